#include "clf/occlusion/ontology.hpp"

#include "../json_util.hpp"
#include "clf/errors.hpp"
#include "clf/ingest/semantic_mask.hpp"

namespace clf::occlusion {

using jsonu::json;

const char* to_string(Category c) noexcept {
  switch (c) {
    case Category::valid: return "valid";
    case Category::occlusion_valid: return "occlusion_valid";
    case Category::invalid: return "invalid";
  }
  return "invalid";
}

Category category_from_string(std::string_view s) {
  if (s == "valid") return Category::valid;
  if (s == "occlusion_valid") return Category::occlusion_valid;
  if (s == "invalid") return Category::invalid;
  raise(ErrorCode::schema, "unknown category '" + std::string(s) + "'");
}

Ontology::Ontology(std::map<std::string, std::vector<std::uint8_t>> subcategory_classes,
                   std::map<std::string, Category> subcategory_parent)
    : subcategory_classes_(std::move(subcategory_classes)),
      subcategory_parent_(std::move(subcategory_parent)) {
  lut_.fill(Category::invalid);
  std::array<bool, 256> claimed{};
  for (const auto& [name, ids] : subcategory_classes_) {
    const auto parent_it = subcategory_parent_.find(name);
    if (parent_it == subcategory_parent_.end()) {
      raise(ErrorCode::schema, "subcategory '" + name + "' has no parent category");
    }
    for (const std::uint8_t id : ids) {
      if (id == ingest::SemanticMask::kUnlabeled) {
        raise(ErrorCode::schema,
              "class 255 is reserved for unlabeled pixels and is always invalid");
      }
      if (claimed[id]) {
        raise(ErrorCode::schema,
              "class " + std::to_string(id) + " mapped by more than one subcategory");
      }
      claimed[id] = true;
      lut_[id] = parent_it->second;
    }
  }
  for (const auto& [name, parent] : subcategory_parent_) {
    (void)parent;
    if (!subcategory_classes_.count(name)) {
      raise(ErrorCode::schema, "parent assignment references unknown subcategory '" + name + "'");
    }
  }
}

const std::string* Ontology::subcategory_of(std::uint8_t class_id) const {
  for (const auto& [name, ids] : subcategory_classes_) {
    for (const std::uint8_t id : ids) {
      if (id == class_id) return &name;
    }
  }
  return nullptr;
}

std::uint8_t Ontology::representative_class(Category parent) const {
  for (const auto& [name, ids] : subcategory_classes_) {
    if (subcategory_parent_.at(name) == parent && !ids.empty()) return ids.front();
  }
  raise(ErrorCode::invalid_argument,
        std::string("ontology has no classes under parent '") + to_string(parent) + "'");
}

Ontology Ontology::builtin_default() {
  // Nine subcategories over a 124-class id space. Contiguous id blocks; the
  // block boundaries are a reconstruction, not a published assignment.
  std::map<std::string, std::vector<std::uint8_t>> classes;
  auto block = [](std::uint8_t lo, std::uint8_t hi) {
    std::vector<std::uint8_t> ids;
    for (int i = lo; i <= hi; ++i) ids.push_back(static_cast<std::uint8_t>(i));
    return ids;
  };
  classes["flat-road"] = block(0, 9);
  classes["crossing-marking"] = block(10, 19);
  classes["vehicle"] = block(20, 34);
  classes["human"] = block(35, 44);
  classes["dynamic-object"] = block(45, 54);
  classes["construction-structure"] = block(55, 79);
  classes["vegetation-terrain"] = block(80, 99);
  classes["sky"] = block(100, 104);
  classes["pole-infrastructure"] = block(105, 123);

  std::map<std::string, Category> parents;
  parents["flat-road"] = Category::valid;
  parents["crossing-marking"] = Category::valid;
  parents["vehicle"] = Category::occlusion_valid;
  parents["human"] = Category::occlusion_valid;
  parents["dynamic-object"] = Category::occlusion_valid;
  parents["construction-structure"] = Category::invalid;
  parents["vegetation-terrain"] = Category::invalid;
  parents["sky"] = Category::invalid;
  parents["pole-infrastructure"] = Category::invalid;

  return Ontology(std::move(classes), std::move(parents));
}

Ontology Ontology::parse(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "ontology");
  const json& subs = jsonu::field(root, "subcategories", "ontology");
  if (!subs.is_object()) raise(ErrorCode::schema, "ontology.subcategories: expected an object");
  std::map<std::string, std::vector<std::uint8_t>> classes;
  for (const auto& [name, ids] : subs.items()) {
    const std::string path = "ontology.subcategories." + name;
    const json& arr = jsonu::array(ids, path);
    std::vector<std::uint8_t> v;
    v.reserve(arr.size());
    for (const auto& id : arr) {
      const std::int64_t raw = jsonu::integer(id, path);
      if (raw < 0 || raw > 254) raise(ErrorCode::schema, path + ": class id out of [0,254]");
      v.push_back(static_cast<std::uint8_t>(raw));
    }
    classes[name] = std::move(v);
  }
  const json& parents = jsonu::field(root, "parents", "ontology");
  if (!parents.is_object() || parents.size() != 3 || !parents.contains("valid") ||
      !parents.contains("occlusion_valid") || !parents.contains("invalid")) {
    raise(ErrorCode::schema,
          "ontology.parents: exactly the keys valid, occlusion_valid, invalid are required");
  }
  std::map<std::string, Category> parent_of;
  for (const auto& [parent_name, members] : parents.items()) {
    const Category parent = category_from_string(parent_name);
    const std::string path = "ontology.parents." + parent_name;
    for (const auto& member : jsonu::array(members, path)) {
      const std::string sub = jsonu::str(member, path);
      if (parent_of.count(sub)) {
        raise(ErrorCode::schema, "subcategory '" + sub + "' assigned to two parents");
      }
      parent_of[sub] = parent;
    }
  }
  return Ontology(std::move(classes), std::move(parent_of));
}

std::string Ontology::serialize() const {
  json subs = json::object();
  for (const auto& [name, ids] : subcategory_classes_) {
    json arr = json::array();
    for (const std::uint8_t id : ids) arr.push_back(static_cast<int>(id));
    subs[name] = std::move(arr);
  }
  json parents;
  parents["valid"] = json::array();
  parents["occlusion_valid"] = json::array();
  parents["invalid"] = json::array();
  for (const auto& [name, parent] : subcategory_parent_) {
    parents[to_string(parent)].push_back(name);
  }
  json root;
  root["subcategories"] = std::move(subs);
  root["parents"] = std::move(parents);
  return root.dump() + "\n";
}

}  // namespace clf::occlusion
