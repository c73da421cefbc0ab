#pragma once

#include <vector>

#include <Eigen/Dense>

#include "clf/heads/head_output.hpp"
#include "clf/labelgen/bev.hpp"

namespace clf::heads {

struct DecodeParams {
  double conf_threshold = 0.5;
  double embed_radius = 1.5;   // embedding distance to the running cluster mean
  std::size_t min_cells = 3;   // clusters smaller than this are dropped
};

/// Head outputs -> 3D centerline polylines in the ego/BEV frame.
///
/// Cells at conf >= conf_threshold are clustered greedily: seed at the
/// highest-confidence unassigned cell, then absorb cells whose embedding
/// distance to the running cluster mean stays below embed_radius. Per
/// cluster and per grid row the highest-confidence cell yields one point
/// (x = cell left edge + sigmoid(logit) * cell, y = row center, z = height);
/// points come back sorted by y.
std::vector<std::vector<Eigen::Vector3d>> decode_bev(const HeadOutput& out,
                                                     const labelgen::BevGridSpec& grid,
                                                     const DecodeParams& params = {});

}  // namespace clf::heads
