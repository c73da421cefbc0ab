#pragma once

#include <cstdint>
#include <vector>

#include "clf/errors.hpp"
#include "clf/occlusion/ontology.hpp"

namespace clf::occlusion {

/// Outcome of occlusion handling for one centerline. kept holds the indices
/// of keypoints surviving the per-keypoint rule (valid and occlusion_valid
/// keypoints, in original order); r_occ = n_occluded / n_total; removed is
/// the training-set decision r_occ >= t_occ.
struct Verdict {
  std::vector<std::size_t> kept;
  std::size_t n_total = 0;
  std::size_t n_occluded = 0;
  double r_occ = 0.0;
  bool removed = false;
};

/// Per-keypoint and per-centerline occlusion handling over class IDs:
/// valid keypoints are kept; occlusion_valid keypoints are kept but counted
/// as occluded; invalid keypoints are dropped and counted. A centerline is
/// removed when r_occ >= t_occ (so t_occ > 1 disables removal).
///
/// Throws EmptyCenterline if any centerline has no keypoints.
std::vector<Verdict> assess_centerlines(
    const std::vector<std::vector<std::uint8_t>>& centerline_classes, const Ontology& ontology,
    double t_occ);

template <class Keypoint>
struct FilterResult {
  std::vector<Verdict> verdicts;                      // one per input centerline
  std::vector<std::vector<Keypoint>> retained;        // P_filtered, kept keypoints only
  std::vector<std::size_t> retained_source;           // input index of each retained line
};

/// Spec-shaped convenience over assess_centerlines: applies the verdicts to
/// the keypoint containers. centerlines[i] and classes[i] must be the same
/// length (LengthMismatch otherwise).
template <class Keypoint>
FilterResult<Keypoint> filter_keypoints(const std::vector<std::vector<Keypoint>>& centerlines,
                                        const std::vector<std::vector<std::uint8_t>>& classes,
                                        const Ontology& ontology, double t_occ) {
  if (centerlines.size() != classes.size()) {
    raise(ErrorCode::length_mismatch, "centerline count " + std::to_string(centerlines.size()) +
                                          " != class-list count " + std::to_string(classes.size()));
  }
  for (std::size_t i = 0; i < centerlines.size(); ++i) {
    if (centerlines[i].size() != classes[i].size()) {
      raise(ErrorCode::length_mismatch,
            "centerline " + std::to_string(i) + ": " + std::to_string(centerlines[i].size()) +
                " keypoints vs " + std::to_string(classes[i].size()) + " labels");
    }
  }
  FilterResult<Keypoint> result;
  result.verdicts = assess_centerlines(classes, ontology, t_occ);
  for (std::size_t i = 0; i < centerlines.size(); ++i) {
    const Verdict& v = result.verdicts[i];
    if (v.removed) continue;
    std::vector<Keypoint> kept;
    kept.reserve(v.kept.size());
    for (const std::size_t j : v.kept) kept.push_back(centerlines[i][j]);
    result.retained.push_back(std::move(kept));
    result.retained_source.push_back(i);
  }
  return result;
}

}  // namespace clf::occlusion
