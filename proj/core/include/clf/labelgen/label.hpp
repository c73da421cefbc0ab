#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "clf/occlusion/ontology.hpp"

namespace clf::labelgen {

/// Paired 2D/3D sample of a projected centerline. pixel and p_cam stay in
/// correspondence: pixel == project(p_cam) within half a pixel.
struct Keypoint {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();   // (u, v), pixels
  Eigen::Vector3d p_cam = Eigen::Vector3d::Zero();   // camera frame, meters
  double depth = 0.0;                                // = p_cam.z()
  std::uint8_t class_id = 0;
  occlusion::Category category = occlusion::Category::invalid;
};

/// One lane's per-frame label. keypoints follow the lane direction oriented
/// so depth increases; after occlusion handling they are P_final (invalid
/// keypoints dropped) and r_occ/n_* record the verdict.
struct CenterlineLabel {
  std::int64_t lane_id = 0;
  bool is_intersection = false;
  std::vector<Keypoint> keypoints;
  double r_occ = 0.0;
  std::size_t n_total = 0;
  std::size_t n_occluded = 0;
  std::vector<Eigen::Vector2d> spline_2d;  // image-plane spline samples
};

}  // namespace clf::labelgen
