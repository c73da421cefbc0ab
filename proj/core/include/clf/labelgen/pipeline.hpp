#pragma once

#include <optional>
#include <vector>

#include "clf/geom/camera.hpp"
#include "clf/geom/pose.hpp"
#include "clf/ingest/semantic_mask.hpp"
#include "clf/ingest/vector_map.hpp"
#include "clf/labelgen/bev.hpp"
#include "clf/labelgen/label.hpp"
#include "clf/occlusion/filter.hpp"

namespace clf::labelgen {

struct LabelParams {
  double spacing = 0.5;        // 3D resampling step, meters (matches the BEV cell)
  double max_depth = 100.0;    // keypoints farther than this are dropped
  double min_px_gap = 5.0;     // greedy pixel-space decimation threshold
  std::size_t min_keypoints = 2;
  double min_length = 3.0;     // minimum surviving 3D arc length, meters
  double spline_px_step = 2.0; // 2D spline sample step, pixels
  double t_occ = 0.4;          // occlusion removal threshold

  void validate() const;
};

/// Resample a lane in 3D, transform through city->ego->camera, project, and
/// decorate every visible keypoint with the semantic class under its
/// (nearest-integer) pixel. Keypoints behind the camera or outside the image
/// are dropped; the result may have any number of keypoints, including zero.
CenterlineLabel project_centerline(const ingest::LaneSegment& lane, const geom::Pose& ego_pose,
                                   const geom::CameraModel& cam, const ingest::SemanticMask& mask,
                                   const occlusion::Ontology& ontology, double spacing);

/// The paper-prescribed geometric post-filters: depth cutoff, greedy pixel
/// decimation, and rejection of intersection / too-short / too-sparse lanes.
/// Idempotent.
std::optional<CenterlineLabel> geometric_filters(CenterlineLabel label, const LabelParams& params);

/// Image-plane spline through the keypoint pixels, sampled every
/// spline_px_step pixels. Throws TooFewPoints below 2 keypoints.
std::vector<Eigen::Vector2d> fit_spline_2d(const std::vector<Keypoint>& keypoints,
                                           double spline_px_step);

/// Keypoint positions mapped to the ego frame (input to encode_bev).
std::vector<Eigen::Vector3d> ego_polyline(const CenterlineLabel& label,
                                          const geom::CameraModel& cam);

/// Occlusion verdict of one post-geometric-filter candidate line, kept for
/// retention statistics across hypothetical thresholds.
struct CandidateStat {
  double r_occ = 0.0;
  std::size_t n_final = 0;  // keypoints surviving the per-keypoint rule
};

/// Everything labelgen produces for one (frame, camera) pair.
struct FrameLabels {
  std::vector<CenterlineLabel> centerlines;  // retained lines, occlusion applied
  BevTargets bev;
  double t_occ_used = 0.0;
  std::vector<CandidateStat> candidates;  // all pre-threshold candidates
};

/// Full per-frame pipeline: project -> geometric filters -> occlusion
/// filtering at params.t_occ -> 2D spline refit -> BEV encoding.
FrameLabels generate_frame(const ingest::VectorMap& map, const geom::Pose& ego_pose,
                           const geom::CameraModel& cam, const ingest::SemanticMask& mask,
                           const occlusion::Ontology& ontology, const LabelParams& params,
                           const BevGridSpec& grid);

}  // namespace clf::labelgen
