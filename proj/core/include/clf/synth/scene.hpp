#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clf/geom/camera.hpp"
#include "clf/geom/trajectory.hpp"
#include "clf/ingest/semantic_mask.hpp"
#include "clf/ingest/vector_map.hpp"
#include "clf/labelgen/bev.hpp"
#include "clf/labelgen/label_io.hpp"
#include "clf/labelgen/pipeline.hpp"
#include "clf/occlusion/ontology.hpp"

namespace clf::synth {

/// Mask painting instruction: keypoints whose index fraction j/N falls in
/// [start_frac, end_frac) get a class of the given parent category.
struct Occluder {
  std::size_t lane_index = 0;
  double start_frac = 0.0;
  double end_frac = 0.0;
  occlusion::Category category = occlusion::Category::invalid;
};

struct SceneSpec {
  std::size_t n_lanes = 3;
  double lane_spacing = 3.5;    // meters between adjacent lanes
  double curvature = 0.0;       // 1/m; 0 = straight lanes
  double lane_length = 120.0;   // meters
  std::vector<Occluder> occluders;
  std::string camera_preset = "forward_1024x576";
  std::uint64_t seed = 0;
  std::size_t n_frames = 1;
  double ego_speed = 10.0;      // m/s along +y

  void validate() const;
};

/// Keypoint the pipeline is expected to emit, computed by an independent
/// analytic projection path (own quaternion/matrix/pinhole math, no shared
/// code with geom or labelgen).
struct ExpectedKeypoint {
  Eigen::Vector3d p_cam = Eigen::Vector3d::Zero();
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  double depth = 0.0;
  std::uint8_t class_id = 0;
  occlusion::Category category = occlusion::Category::valid;
};

/// One lane's expected post-geometric-filter keypoints plus the occlusion
/// verdict derived from them. final_indices lists P_final (invalid dropped);
/// the line is expected to survive threshold t iff r_occ < t.
struct ExpectedCenterline {
  std::int64_t lane_id = 0;
  std::vector<ExpectedKeypoint> keypoints;
  std::vector<std::size_t> final_indices;
  std::size_t n_occluded = 0;
  double r_occ = 0.0;
};

struct ExpectedFrame {
  std::vector<ExpectedCenterline> centerlines;
  labelgen::BevTargets bev;  // over P_final of every surviving line
};

struct SceneBundle {
  ingest::VectorMap map;
  geom::Trajectory trajectory;
  std::vector<geom::CameraModel> cameras;  // one per preset camera
  std::vector<ingest::SemanticMask> masks;     // per frame
  std::vector<ExpectedFrame> expected;         // per frame
  occlusion::Ontology ontology;
  labelgen::LabelParams params;
  labelgen::BevGridSpec grid;
};

/// Deterministic scene construction: lanes are straight lines or circular
/// arcs with analytically known arc-length parameterization, so expected
/// keypoints are exact. Masks are painted so exactly the requested keypoint
/// fractions land on occluder classes.
SceneBundle generate(const SceneSpec& spec, const occlusion::Ontology& ontology,
                     const labelgen::LabelParams& params, const labelgen::BevGridSpec& grid);

/// Writes the ingest-format files plus expected labels:
///   map.cmap.json, ego.traj.json, cameras.calib.json, ontology.ontology.json,
///   masks/frame_NNNNNN_<cam>.smask, expected/frame_NNNNNN_<cam>.clabel.json
void write_bundle(const SceneBundle& bundle, const std::filesystem::path& dir);

/// Expected frame -> the label-file structure (t_occ_used = +inf, no removal
/// applied; spline samples are left empty, they have no analytic oracle).
labelgen::LabeledFrame expected_to_labeled(const ExpectedFrame& frame, std::size_t frame_index,
                                           const std::string& camera);

std::string frame_stem(std::size_t frame_index, const std::string& camera);

}  // namespace clf::synth
