#include <cstdio>
#include <limits>

#include "../json_util.hpp"
#include "clf/ingest/io.hpp"
#include "clf/labelgen/label_io.hpp"
#include "clf/synth/scene.hpp"

namespace clf::synth {

using jsonu::json;

std::string frame_stem(std::size_t frame_index, const std::string& camera) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu", frame_index);
  return std::string(buf) + "_" + camera;
}

labelgen::LabeledFrame expected_to_labeled(const ExpectedFrame& frame, std::size_t frame_index,
                                           const std::string& camera) {
  labelgen::LabeledFrame out;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", frame_index);
  out.frame_id = buf;
  out.camera = camera;
  out.labels.t_occ_used = std::numeric_limits<double>::infinity();
  out.labels.bev = frame.bev;
  for (const ExpectedCenterline& line : frame.centerlines) {
    if (line.final_indices.size() < 2) continue;
    labelgen::CenterlineLabel cl;
    cl.lane_id = line.lane_id;
    cl.r_occ = line.r_occ;
    cl.n_total = line.keypoints.size();
    cl.n_occluded = line.n_occluded;
    for (const std::size_t j : line.final_indices) {
      const ExpectedKeypoint& src = line.keypoints[j];
      labelgen::Keypoint kp;
      kp.pixel = src.pixel;
      kp.p_cam = src.p_cam;
      kp.depth = src.depth;
      kp.class_id = src.class_id;
      kp.category = src.category;
      cl.keypoints.push_back(kp);
    }
    out.labels.centerlines.push_back(std::move(cl));
  }
  return out;
}

void write_bundle(const SceneBundle& bundle, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "masks");
  fs::create_directories(dir / "expected");

  ingest::write_file(dir / "map.cmap.json", ingest::serialize_map(bundle.map));
  ingest::write_file(dir / "ego.traj.json", ingest::serialize_trajectory(bundle.trajectory));
  ingest::write_file(dir / "cameras.calib.json", ingest::serialize_calibration(bundle.cameras));
  ingest::write_file(dir / "ontology.ontology.json", bundle.ontology.serialize());

  const std::string camera = bundle.cameras.front().name();
  for (std::size_t i = 0; i < bundle.masks.size(); ++i) {
    const std::string stem = frame_stem(i, camera);
    ingest::write_file(dir / "masks" / (stem + ".smask"),
                       ingest::serialize_mask(bundle.masks[i]));
    ingest::write_file(dir / "expected" / (stem + ".clabel.json"),
                       labelgen::serialize_labels(expected_to_labeled(bundle.expected[i], i, camera)));
  }

  json meta;
  meta["camera"] = camera;
  meta["n_frames"] = bundle.masks.size();
  meta["grid"] = {{"x_min", bundle.grid.x_min}, {"x_max", bundle.grid.x_max},
                  {"y_min", bundle.grid.y_min}, {"y_max", bundle.grid.y_max},
                  {"cell", bundle.grid.cell}};
  meta["params"] = {{"spacing", bundle.params.spacing},
                    {"max_depth", bundle.params.max_depth},
                    {"min_px_gap", bundle.params.min_px_gap},
                    {"min_keypoints", bundle.params.min_keypoints},
                    {"min_length", bundle.params.min_length},
                    {"spline_px_step", bundle.params.spline_px_step},
                    {"t_occ", bundle.params.t_occ}};
  ingest::write_file(dir / "bundle.json", meta.dump() + "\n");
}

}  // namespace clf::synth
