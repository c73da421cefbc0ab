#include "clf/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "clf/errors.hpp"

namespace clf::synth {

namespace {

// ---------------------------------------------------------------------------
// Oracle-local math. This path intentionally re-implements the quaternion /
// transform / pinhole formulas so the pipeline under test shares no code
// with the expectations it is checked against.

struct OracleMat3 {
  double m[3][3];

  Eigen::Vector3d mul(const Eigen::Vector3d& p) const {
    return {m[0][0] * p.x() + m[0][1] * p.y() + m[0][2] * p.z(),
            m[1][0] * p.x() + m[1][1] * p.y() + m[1][2] * p.z(),
            m[2][0] * p.x() + m[2][1] * p.y() + m[2][2] * p.z()};
  }
  Eigen::Vector3d mul_transposed(const Eigen::Vector3d& p) const {
    return {m[0][0] * p.x() + m[1][0] * p.y() + m[2][0] * p.z(),
            m[0][1] * p.x() + m[1][1] * p.y() + m[2][1] * p.z(),
            m[0][2] * p.x() + m[1][2] * p.y() + m[2][2] * p.z()};
  }
};

OracleMat3 quat_to_matrix(double w, double x, double y, double z) {
  OracleMat3 r;
  r.m[0][0] = 1.0 - 2.0 * (y * y + z * z);
  r.m[0][1] = 2.0 * (x * y - w * z);
  r.m[0][2] = 2.0 * (x * z + w * y);
  r.m[1][0] = 2.0 * (x * y + w * z);
  r.m[1][1] = 1.0 - 2.0 * (x * x + z * z);
  r.m[1][2] = 2.0 * (y * z - w * x);
  r.m[2][0] = 2.0 * (x * z - w * y);
  r.m[2][1] = 2.0 * (y * z + w * x);
  r.m[2][2] = 1.0 - 2.0 * (x * x + y * y);
  return r;
}

struct OracleCamera {
  double fx, fy, cx, cy;
  int width, height;
  OracleMat3 rot_cam_to_ego;  // extrinsic rotation
  Eigen::Vector3d t_cam_in_ego;
};

struct OraclePixel {
  double u, v, depth;
  bool visible;
};

OraclePixel oracle_project(const OracleCamera& cam, const OracleMat3& rot_ego_to_city,
                           const Eigen::Vector3d& ego_t, const Eigen::Vector3d& p_city,
                           Eigen::Vector3d* p_cam_out) {
  const Eigen::Vector3d p_ego = rot_ego_to_city.mul_transposed(p_city - ego_t);
  const Eigen::Vector3d p_cam = cam.rot_cam_to_ego.mul_transposed(p_ego - cam.t_cam_in_ego);
  *p_cam_out = p_cam;
  OraclePixel px{0.0, 0.0, p_cam.z(), false};
  if (!(p_cam.z() > 0.1)) return px;
  px.u = cam.fx * p_cam.x() / p_cam.z() + cam.cx;
  px.v = cam.fy * p_cam.y() / p_cam.z() + cam.cy;
  if (!(px.u >= 0.0 && px.u < cam.width && px.v >= 0.0 && px.v < cam.height)) return px;
  const double ru = std::round(px.u);
  const double rv = std::round(px.v);
  if (!(ru >= 0.0 && ru < cam.width && rv >= 0.0 && rv < cam.height)) return px;
  px.visible = true;
  return px;
}

// Camera preset constants (forward camera, 1.6 m above ground, pitch 0,
// optical axis along +y of the ego frame).
constexpr double kPresetFx = 800.0;
constexpr double kPresetFy = 800.0;
constexpr double kPresetCx = 512.0;
constexpr double kPresetCy = 288.0;
constexpr int kPresetWidth = 1024;
constexpr int kPresetHeight = 576;
constexpr double kPresetQw = 0.70710678118654752440;  // -90 deg about x
constexpr double kPresetQx = -0.70710678118654752440;
const Eigen::Vector3d kPresetT(0.0, 0.2, 1.6);
constexpr const char* kPresetCameraName = "forward";
constexpr std::int64_t kFrameIntervalNs = 100'000'000;  // 10 Hz

Eigen::Vector3d lane_point(double x0, double curvature, double s) {
  if (curvature == 0.0) return {x0, s, 0.0};
  return {x0 + (1.0 - std::cos(curvature * s)) / curvature, std::sin(curvature * s) / curvature,
          0.0};
}

// Independent row-crossing rasterizer for the expected BEV block; same
// definition as the module contract (row centers, nearest-|x| crossing per
// lane and row, one cell per pair).
labelgen::BevTargets oracle_encode_bev(const std::vector<std::vector<Eigen::Vector3d>>& lines,
                                       const labelgen::BevGridSpec& grid) {
  labelgen::BevTargets t;
  t.spec = grid;
  const int rows = grid.rows();
  const int cols = grid.cols();
  t.seg = labelgen::Grid<std::uint8_t>(rows, cols, 0);
  t.x_offset = labelgen::Grid<double>(rows, cols, labelgen::BevTargets::kUndefined);
  t.height = labelgen::Grid<double>(rows, cols, labelgen::BevTargets::kUndefined);
  t.instance = labelgen::Grid<std::uint32_t>(rows, cols, 0);
  for (std::size_t lane = 0; lane < lines.size(); ++lane) {
    std::vector<double> best_x(static_cast<std::size_t>(rows),
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<double> best_z(static_cast<std::size_t>(rows), 0.0);
    const auto& poly = lines[lane];
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      const auto& p = poly[i];
      const auto& q = poly[i + 1];
      const double y_lo = std::min(p.y(), q.y());
      const double y_hi = std::max(p.y(), q.y());
      if (y_lo == y_hi) continue;
      for (int r = 0; r < rows; ++r) {
        const double yc = grid.y_min + (r + 0.5) * grid.cell;
        if (yc < y_lo || yc >= y_hi) continue;
        const double a = (yc - p.y()) / (q.y() - p.y());
        const double x = p.x() + a * (q.x() - p.x());
        const double z = p.z() + a * (q.z() - p.z());
        if (x < grid.x_min || x >= grid.x_max) continue;
        if (std::isnan(best_x[r]) || std::abs(x) < std::abs(best_x[r])) {
          best_x[r] = x;
          best_z[r] = z;
        }
      }
    }
    for (int r = 0; r < rows; ++r) {
      if (std::isnan(best_x[r])) continue;
      const int col = static_cast<int>(std::floor((best_x[r] - grid.x_min) / grid.cell));
      t.seg.at(r, col) = 1;
      t.x_offset.at(r, col) = (best_x[r] - (grid.x_min + col * grid.cell)) / grid.cell;
      t.height.at(r, col) = best_z[r];
      t.instance.at(r, col) = static_cast<std::uint32_t>(lane + 1);
    }
  }
  return t;
}

}  // namespace

void SceneSpec::validate() const {
  if (n_lanes < 1) raise(ErrorCode::invalid_spec, "n_lanes must be >= 1");
  if (!(lane_spacing > 0.0)) raise(ErrorCode::invalid_spec, "lane_spacing must be positive");
  if (!(lane_length > 0.0)) raise(ErrorCode::invalid_spec, "lane_length must be positive");
  if (n_frames < 1) raise(ErrorCode::invalid_spec, "n_frames must be >= 1");
  if (!(ego_speed >= 0.0)) raise(ErrorCode::invalid_spec, "ego_speed must be >= 0");
  if (std::abs(curvature) > 0.05) {
    raise(ErrorCode::invalid_spec, "|curvature| must be <= 0.05 1/m for oracle accuracy");
  }
  if (std::abs(curvature) * lane_length > 1.4) {
    raise(ErrorCode::invalid_spec, "arc sweep too large; keep |curvature|*lane_length <= 1.4");
  }
  if (camera_preset != "forward_1024x576") {
    raise(ErrorCode::invalid_spec, "unknown camera preset '" + camera_preset + "'");
  }
  for (const Occluder& occ : occluders) {
    if (occ.lane_index >= n_lanes) raise(ErrorCode::invalid_spec, "occluder lane out of range");
    if (!(occ.start_frac >= 0.0 && occ.end_frac <= 1.0 && occ.start_frac < occ.end_frac)) {
      raise(ErrorCode::invalid_spec, "occluder fractions must satisfy 0 <= start < end <= 1");
    }
    if (occ.category == occlusion::Category::valid) {
      raise(ErrorCode::invalid_spec, "occluders must be occlusion_valid or invalid");
    }
  }
}

SceneBundle generate(const SceneSpec& spec, const occlusion::Ontology& ontology,
                     const labelgen::LabelParams& params, const labelgen::BevGridSpec& grid) {
  spec.validate();
  params.validate();
  grid.validate();

  SceneBundle bundle{.map = ingest::VectorMap("synth-city"),
                     .trajectory = {},
                     .cameras = {},
                     .masks = {},
                     .expected = {},
                     .ontology = ontology,
                     .params = params,
                     .grid = grid};

  // Camera (one preset camera).
  const geom::Pose extrinsic(Eigen::Quaterniond(kPresetQw, kPresetQx, 0.0, 0.0), kPresetT);
  bundle.cameras.emplace_back(kPresetCameraName, kPresetFx, kPresetFy, kPresetCx, kPresetCy,
                              kPresetWidth, kPresetHeight, extrinsic);

  OracleCamera ocam{kPresetFx, kPresetFy, kPresetCx,    kPresetCy,
                    kPresetWidth, kPresetHeight, quat_to_matrix(kPresetQw, kPresetQx, 0.0, 0.0),
                    kPresetT};
  const OracleMat3 ego_rot = quat_to_matrix(1.0, 0.0, 0.0, 0.0);

  // Lane base offsets, jittered by the seed.
  std::mt19937_64 rng(spec.seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng()) / static_cast<double>(std::mt19937_64::max());
  };
  std::vector<double> lane_x0(spec.n_lanes);
  for (std::size_t i = 0; i < spec.n_lanes; ++i) {
    const double centered =
        (static_cast<double>(i) - (static_cast<double>(spec.n_lanes) - 1.0) / 2.0) *
        spec.lane_spacing;
    lane_x0[i] = centered + (unit() - 0.5) * 0.5;
  }

  // Map polylines. Straight lanes need only sparse vertices; arcs get dense
  // ones so the pipeline's spline interpolant stays within 1e-6 m of the arc.
  const double vertex_step = spec.curvature == 0.0 ? 5.0 : 0.25;
  for (std::size_t i = 0; i < spec.n_lanes; ++i) {
    ingest::LaneSegment lane;
    lane.lane_id = 100 + static_cast<std::int64_t>(i);
    lane.is_intersection = false;
    const auto n_verts = static_cast<std::size_t>(std::floor(spec.lane_length / vertex_step + 1e-9));
    for (std::size_t k = 0; k <= n_verts; ++k) {
      lane.centerline.push_back(lane_point(lane_x0[i], spec.curvature,
                                           static_cast<double>(k) * vertex_step));
    }
    if (spec.lane_length - static_cast<double>(n_verts) * vertex_step > 1e-9) {
      lane.centerline.push_back(lane_point(lane_x0[i], spec.curvature, spec.lane_length));
    }
    bundle.map.add_lane(std::move(lane));
  }

  // Trajectory: ego drives along +y at constant speed, identity heading.
  {
    std::vector<geom::Pose> poses;
    poses.reserve(spec.n_frames);
    for (std::size_t k = 0; k < spec.n_frames; ++k) {
      const double t_s = static_cast<double>(k) * 0.1;
      poses.emplace_back(Eigen::Quaterniond::Identity(),
                         Eigen::Vector3d(0.0, spec.ego_speed * t_s, 0.0),
                         static_cast<std::int64_t>(k) * kFrameIntervalNs);
    }
    bundle.trajectory = geom::Trajectory(std::move(poses));
  }

  const std::uint8_t class_valid = ontology.representative_class(occlusion::Category::valid);

  // Per frame: expected keypoints via the analytic path, then masks painted
  // so the requested fractions land on occluder classes.
  for (std::size_t frame = 0; frame < spec.n_frames; ++frame) {
    const Eigen::Vector3d ego_t(0.0, spec.ego_speed * 0.1 * static_cast<double>(frame), 0.0);

    ExpectedFrame expected;
    for (std::size_t lane_idx = 0; lane_idx < spec.n_lanes; ++lane_idx) {
      // Analytic arc-length resampling (mirrors sample_every semantics).
      const auto n_steps =
          static_cast<std::size_t>(std::floor(spec.lane_length / params.spacing + 1e-9));
      std::vector<double> arcs;
      arcs.reserve(n_steps + 2);
      for (std::size_t k = 0; k <= n_steps; ++k) arcs.push_back(static_cast<double>(k) * params.spacing);
      if (spec.lane_length - static_cast<double>(n_steps) * params.spacing > 1e-9) {
        arcs.push_back(spec.lane_length);
      }

      // Project, keep the visible ones.
      std::vector<ExpectedKeypoint> visible;
      for (const double s : arcs) {
        const Eigen::Vector3d p_city = lane_point(lane_x0[lane_idx], spec.curvature, s);
        Eigen::Vector3d p_cam;
        const OraclePixel px = oracle_project(ocam, ego_rot, ego_t, p_city, &p_cam);
        if (!px.visible) continue;
        ExpectedKeypoint kp;
        kp.p_cam = p_cam;
        kp.pixel = {px.u, px.v};
        kp.depth = px.depth;
        visible.push_back(kp);
      }
      if (visible.size() >= 2 && visible.front().depth > visible.back().depth) {
        std::reverse(visible.begin(), visible.end());
      }

      // Geometric filters: depth cutoff then greedy pixel decimation.
      std::vector<ExpectedKeypoint> kept;
      for (const ExpectedKeypoint& kp : visible) {
        if (kp.depth > params.max_depth) continue;
        if (!kept.empty() && (kp.pixel - kept.back().pixel).norm() < params.min_px_gap) continue;
        kept.push_back(kp);
      }
      if (kept.size() < params.min_keypoints) continue;
      double arc_len = 0.0;
      for (std::size_t k = 1; k < kept.size(); ++k) {
        arc_len += (kept[k].p_cam - kept[k - 1].p_cam).norm();
      }
      if (arc_len < params.min_length) continue;

      // Occlusion assignment by index fraction.
      ExpectedCenterline line;
      line.lane_id = 100 + static_cast<std::int64_t>(lane_idx);
      line.keypoints = std::move(kept);
      const auto n_total = static_cast<double>(line.keypoints.size());
      for (std::size_t j = 0; j < line.keypoints.size(); ++j) {
        ExpectedKeypoint& kp = line.keypoints[j];
        kp.class_id = class_valid;
        kp.category = occlusion::Category::valid;
        const double frac = static_cast<double>(j) / n_total;
        for (const Occluder& occ : spec.occluders) {
          if (occ.lane_index != lane_idx) continue;
          if (frac >= occ.start_frac && frac < occ.end_frac) {
            kp.category = occ.category;
            kp.class_id = ontology.representative_class(occ.category);
          }
        }
      }
      for (std::size_t j = 0; j < line.keypoints.size(); ++j) {
        const auto category = line.keypoints[j].category;
        if (category != occlusion::Category::valid) ++line.n_occluded;
        if (category != occlusion::Category::invalid) line.final_indices.push_back(j);
      }
      line.r_occ = static_cast<double>(line.n_occluded) / n_total;
      expected.centerlines.push_back(std::move(line));
    }

    // Cross-talk guard: painted 3x3 blocks must not touch keypoints of a
    // different category.
    for (const auto& la : expected.centerlines) {
      for (const auto& ka : la.keypoints) {
        for (const auto& lb : expected.centerlines) {
          for (const auto& kb : lb.keypoints) {
            if (&ka == &kb || ka.category == kb.category) continue;
            if (std::abs(std::round(ka.pixel.x()) - std::round(kb.pixel.x())) <= 2.0 &&
                std::abs(std::round(ka.pixel.y()) - std::round(kb.pixel.y())) <= 2.0) {
              raise(ErrorCode::invalid_spec,
                    "occluder painting would collide with another keypoint; adjust the scene");
            }
          }
        }
      }
    }

    // Paint the mask.
    ingest::SemanticMask mask(kPresetWidth, kPresetHeight, class_valid);
    for (const auto& line : expected.centerlines) {
      for (const auto& kp : line.keypoints) {
        if (kp.category == occlusion::Category::valid) continue;
        const auto cu = static_cast<long long>(std::llround(kp.pixel.x()));
        const auto cv = static_cast<long long>(std::llround(kp.pixel.y()));
        for (long long dv = -1; dv <= 1; ++dv) {
          for (long long du = -1; du <= 1; ++du) {
            const long long u = cu + du, v = cv + dv;
            if (u < 0 || v < 0 || u >= kPresetWidth || v >= kPresetHeight) continue;
            mask.set(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), kp.class_id);
          }
        }
      }
    }

    // Expected BEV over P_final of surviving lines, ego frame.
    {
      std::vector<std::vector<Eigen::Vector3d>> ego_lines;
      for (const auto& line : expected.centerlines) {
        if (line.final_indices.size() < params.min_keypoints) continue;
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(line.final_indices.size());
        for (const std::size_t j : line.final_indices) {
          pts.push_back(ocam.rot_cam_to_ego.mul(line.keypoints[j].p_cam) + ocam.t_cam_in_ego);
        }
        ego_lines.push_back(std::move(pts));
      }
      expected.bev = oracle_encode_bev(ego_lines, grid);
    }

    bundle.masks.push_back(std::move(mask));
    bundle.expected.push_back(std::move(expected));
  }

  return bundle;
}

}  // namespace clf::synth
