#include "clf/occlusion/filter.hpp"

namespace clf::occlusion {

std::vector<Verdict> assess_centerlines(
    const std::vector<std::vector<std::uint8_t>>& centerline_classes, const Ontology& ontology,
    double t_occ) {
  std::vector<Verdict> verdicts;
  verdicts.reserve(centerline_classes.size());
  for (std::size_t i = 0; i < centerline_classes.size(); ++i) {
    const auto& classes = centerline_classes[i];
    if (classes.empty()) {
      raise(ErrorCode::empty_centerline, "centerline " + std::to_string(i) + " has no keypoints");
    }
    Verdict v;
    v.n_total = classes.size();
    for (std::size_t j = 0; j < classes.size(); ++j) {
      switch (ontology.categorize(classes[j])) {
        case Category::invalid:
          ++v.n_occluded;
          break;
        case Category::occlusion_valid:
          ++v.n_occluded;
          v.kept.push_back(j);
          break;
        case Category::valid:
          v.kept.push_back(j);
          break;
      }
    }
    v.r_occ = static_cast<double>(v.n_occluded) / static_cast<double>(v.n_total);
    v.removed = v.r_occ >= t_occ;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

}  // namespace clf::occlusion
