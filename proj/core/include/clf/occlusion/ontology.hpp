#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace clf::occlusion {

/// Parent categories driving keypoint filtering:
///   valid           - drivable road surface, keypoint kept
///   occlusion_valid - on-road occluders with recoverable context, keypoint
///                     kept but counted as occluded
///   invalid         - context-free occluders, keypoint dropped and counted
enum class Category { valid, occlusion_valid, invalid };

const char* to_string(Category c) noexcept;
Category category_from_string(std::string_view s);

/// Two-level semantic ontology: class ID -> subcategory -> parent category.
/// Total over class IDs; anything unmapped (including the unlabeled ID 255)
/// resolves to invalid.
class Ontology {
 public:
  Ontology(std::map<std::string, std::vector<std::uint8_t>> subcategory_classes,
           std::map<std::string, Category> subcategory_parent);

  Category categorize(std::uint8_t class_id) const { return lut_[class_id]; }

  /// Subcategory name owning the class ID, or nullptr when unmapped.
  const std::string* subcategory_of(std::uint8_t class_id) const;

  const std::map<std::string, std::vector<std::uint8_t>>& subcategories() const {
    return subcategory_classes_;
  }
  const std::map<std::string, Category>& parents() const { return subcategory_parent_; }

  /// First class ID of some subcategory under the given parent. Handy for
  /// synthesizing masks.
  std::uint8_t representative_class(Category parent) const;

  /// The nine-subcategory default mapping. The per-class assignment is a
  /// reconstruction, meant to be overridden via an .ontology.json config
  /// when real segmentation classes are in play.
  static Ontology builtin_default();

  // .ontology.json: {"subcategories": {name: [class_ids]},
  //                  "parents": {"valid": [names], "occlusion_valid": [names], "invalid": [names]}}
  static Ontology parse(std::string_view bytes);
  std::string serialize() const;

 private:
  std::map<std::string, std::vector<std::uint8_t>> subcategory_classes_;
  std::map<std::string, Category> subcategory_parent_;
  std::array<Category, 256> lut_;
};

}  // namespace clf::occlusion
