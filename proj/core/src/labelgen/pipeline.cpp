#include "clf/labelgen/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "clf/labelgen/spline.hpp"

namespace clf::labelgen {

void LabelParams::validate() const {
  if (!(spacing > 0.0)) raise(ErrorCode::invalid_argument, "spacing must be positive");
  if (!(max_depth > geom::kMinProjectionDepth)) {
    raise(ErrorCode::invalid_argument, "max_depth must exceed the projection near cutoff");
  }
  if (min_px_gap < 0.0) raise(ErrorCode::invalid_argument, "min_px_gap must be >= 0");
  if (min_keypoints < 2) raise(ErrorCode::invalid_argument, "min_keypoints must be >= 2");
  if (min_length < 0.0) raise(ErrorCode::invalid_argument, "min_length must be >= 0");
  if (!(spline_px_step > 0.0)) raise(ErrorCode::invalid_argument, "spline_px_step must be positive");
  if (!(t_occ >= 0.0)) raise(ErrorCode::invalid_argument, "t_occ must be >= 0");
}

CenterlineLabel project_centerline(const ingest::LaneSegment& lane, const geom::Pose& ego_pose,
                                   const geom::CameraModel& cam, const ingest::SemanticMask& mask,
                                   const occlusion::Ontology& ontology, double spacing) {
  if (mask.width() != static_cast<std::uint32_t>(cam.width()) ||
      mask.height() != static_cast<std::uint32_t>(cam.height())) {
    raise(ErrorCode::shape_mismatch,
          "mask " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
              " does not match camera '" + cam.name() + "' " + std::to_string(cam.width()) + "x" +
              std::to_string(cam.height()));
  }

  CenterlineLabel label;
  label.lane_id = lane.lane_id;
  label.is_intersection = lane.is_intersection;

  for (const Eigen::Vector3d& p_city : resample_polyline(lane.centerline, spacing)) {
    const Eigen::Vector3d p_cam = geom::city_to_camera(p_city, ego_pose, cam);
    const auto proj = cam.project(p_cam);
    if (!proj) continue;
    // The class lookup rounds to the nearest pixel; a sliver at the image
    // border can round outside, treat it as not visible.
    const double ru = std::round(proj->u);
    const double rv = std::round(proj->v);
    if (!cam.pixel_in_image(ru, rv)) continue;

    Keypoint kp;
    kp.pixel = {proj->u, proj->v};
    kp.p_cam = p_cam;
    kp.depth = proj->depth;
    kp.class_id = mask.class_at_pixel(proj->u, proj->v);
    kp.category = ontology.categorize(kp.class_id);
    label.keypoints.push_back(kp);
  }

  // Orient along increasing depth.
  if (label.keypoints.size() >= 2 &&
      label.keypoints.front().depth > label.keypoints.back().depth) {
    std::reverse(label.keypoints.begin(), label.keypoints.end());
  }
  return label;
}

std::optional<CenterlineLabel> geometric_filters(CenterlineLabel label,
                                                 const LabelParams& params) {
  if (label.is_intersection) return std::nullopt;

  std::vector<Keypoint> kept;
  kept.reserve(label.keypoints.size());
  for (const Keypoint& kp : label.keypoints) {
    if (kp.depth > params.max_depth) continue;  // too far
    if (!kept.empty() && (kp.pixel - kept.back().pixel).norm() < params.min_px_gap) {
      continue;  // too tightly packed
    }
    kept.push_back(kp);
  }

  if (kept.size() < params.min_keypoints) return std::nullopt;

  double arc_len = 0.0;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    arc_len += (kept[i].p_cam - kept[i - 1].p_cam).norm();
  }
  if (arc_len < params.min_length) return std::nullopt;

  label.keypoints = std::move(kept);
  return label;
}

std::vector<Eigen::Vector2d> fit_spline_2d(const std::vector<Keypoint>& keypoints,
                                           double spline_px_step) {
  if (keypoints.size() < 2) {
    raise(ErrorCode::too_few_points, "2D spline needs >= 2 keypoints, got " +
                                         std::to_string(keypoints.size()));
  }
  std::vector<Eigen::Vector2d> pixels;
  pixels.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints) pixels.push_back(kp.pixel);
  return Spline2d(std::move(pixels)).sample_every(spline_px_step);
}

std::vector<Eigen::Vector3d> ego_polyline(const CenterlineLabel& label,
                                          const geom::CameraModel& cam) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(label.keypoints.size());
  for (const Keypoint& kp : label.keypoints) {
    out.push_back(geom::camera_to_ego(kp.p_cam, cam));
  }
  return out;
}

FrameLabels generate_frame(const ingest::VectorMap& map, const geom::Pose& ego_pose,
                           const geom::CameraModel& cam, const ingest::SemanticMask& mask,
                           const occlusion::Ontology& ontology, const LabelParams& params,
                           const BevGridSpec& grid) {
  params.validate();

  std::vector<CenterlineLabel> candidates;
  for (const auto& [lane_id, lane] : map.lanes()) {
    CenterlineLabel projected =
        project_centerline(lane, ego_pose, cam, mask, ontology, params.spacing);
    if (auto filtered = geometric_filters(std::move(projected), params)) {
      candidates.push_back(std::move(*filtered));
    }
  }

  std::vector<std::vector<std::uint8_t>> classes;
  classes.reserve(candidates.size());
  for (const auto& label : candidates) {
    std::vector<std::uint8_t> ids;
    ids.reserve(label.keypoints.size());
    for (const auto& kp : label.keypoints) ids.push_back(kp.class_id);
    classes.push_back(std::move(ids));
  }
  const auto verdicts = occlusion::assess_centerlines(classes, ontology, params.t_occ);

  FrameLabels frame;
  frame.t_occ_used = params.t_occ;
  frame.candidates.reserve(verdicts.size());
  for (const auto& v : verdicts) {
    frame.candidates.push_back({v.r_occ, v.kept.size()});
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& v = verdicts[i];
    if (v.removed) continue;
    if (v.kept.size() < params.min_keypoints) continue;  // occlusion left too little
    CenterlineLabel out;
    out.lane_id = candidates[i].lane_id;
    out.is_intersection = candidates[i].is_intersection;
    out.keypoints.reserve(v.kept.size());
    for (const std::size_t j : v.kept) out.keypoints.push_back(candidates[i].keypoints[j]);
    out.r_occ = v.r_occ;
    out.n_total = v.n_total;
    out.n_occluded = v.n_occluded;
    out.spline_2d = fit_spline_2d(out.keypoints, params.spline_px_step);
    frame.centerlines.push_back(std::move(out));
  }

  std::vector<std::vector<Eigen::Vector3d>> ego_lines;
  ego_lines.reserve(frame.centerlines.size());
  for (const auto& label : frame.centerlines) {
    ego_lines.push_back(ego_polyline(label, cam));
  }
  frame.bev = encode_bev(ego_lines, grid);
  return frame;
}

}  // namespace clf::labelgen
