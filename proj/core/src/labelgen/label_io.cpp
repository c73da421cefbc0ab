#include "clf/labelgen/label_io.hpp"

#include <cmath>
#include <limits>

#include "../json_util.hpp"

namespace clf::labelgen {

using jsonu::json;

namespace {

json grid_to_json(const Grid<double>& g) {
  json arr = json::array();
  for (const double v : g.data()) {
    if (std::isnan(v)) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(v);
    }
  }
  return arr;
}

template <class T>
json grid_to_json_int(const Grid<T>& g) {
  json arr = json::array();
  for (const T v : g.data()) arr.push_back(static_cast<std::int64_t>(v));
  return arr;
}

json spec_to_json(const BevGridSpec& spec) {
  json j;
  j["x_min"] = spec.x_min;
  j["x_max"] = spec.x_max;
  j["y_min"] = spec.y_min;
  j["y_max"] = spec.y_max;
  j["cell"] = spec.cell;
  return j;
}

BevGridSpec spec_from_json(const json& j, const std::string& path) {
  BevGridSpec spec;
  spec.x_min = jsonu::num(jsonu::field(j, "x_min", path), path + ".x_min");
  spec.x_max = jsonu::num(jsonu::field(j, "x_max", path), path + ".x_max");
  spec.y_min = jsonu::num(jsonu::field(j, "y_min", path), path + ".y_min");
  spec.y_max = jsonu::num(jsonu::field(j, "y_max", path), path + ".y_max");
  spec.cell = jsonu::num(jsonu::field(j, "cell", path), path + ".cell");
  try {
    spec.validate();
  } catch (const Error& e) {
    raise(ErrorCode::schema, path + ": " + e.what());
  }
  return spec;
}

Grid<double> grid_from_json(const json& arr, int rows, int cols, const std::string& path) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows) * cols) {
    raise(ErrorCode::schema, path + ": expected " + std::to_string(rows * cols) + " cells");
  }
  Grid<double> g(rows, cols, BevTargets::kUndefined);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_null()) g.data()[i] = jsonu::num(arr[i], path);
  }
  return g;
}

template <class T>
Grid<T> grid_from_json_int(const json& arr, int rows, int cols, const std::string& path) {
  if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows) * cols) {
    raise(ErrorCode::schema, path + ": expected " + std::to_string(rows * cols) + " cells");
  }
  Grid<T> g(rows, cols, T{});
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::int64_t v = jsonu::integer(arr[i], path);
    if (v < 0) raise(ErrorCode::schema, path + ": negative cell value");
    g.data()[i] = static_cast<T>(v);
  }
  return g;
}

}  // namespace

std::string serialize_labels(const LabeledFrame& frame) {
  json root;
  root["frame_id"] = frame.frame_id;
  root["camera"] = frame.camera;
  if (std::isfinite(frame.labels.t_occ_used)) {
    root["t_occ_used"] = frame.labels.t_occ_used;
  } else {
    root["t_occ_used"] = nullptr;
  }

  json lines = json::array();
  for (const CenterlineLabel& cl : frame.labels.centerlines) {
    json jl;
    jl["lane_id"] = cl.lane_id;
    jl["r_occ"] = cl.r_occ;
    jl["n_total"] = cl.n_total;
    jl["n_occluded"] = cl.n_occluded;
    json kps = json::array();
    for (const Keypoint& kp : cl.keypoints) {
      json jk;
      jk["u"] = kp.pixel.x();
      jk["v"] = kp.pixel.y();
      jk["x"] = kp.p_cam.x();
      jk["y"] = kp.p_cam.y();
      jk["z"] = kp.p_cam.z();
      jk["depth"] = kp.depth;
      jk["class_id"] = static_cast<int>(kp.class_id);
      jk["category"] = occlusion::to_string(kp.category);
      kps.push_back(std::move(jk));
    }
    jl["keypoints"] = std::move(kps);
    json spl = json::array();
    for (const auto& p : cl.spline_2d) spl.push_back(json::array({p.x(), p.y()}));
    jl["spline_2d"] = std::move(spl);
    lines.push_back(std::move(jl));
  }
  root["centerlines"] = std::move(lines);

  json bev;
  bev["spec"] = spec_to_json(frame.labels.bev.spec);
  bev["seg"] = grid_to_json_int(frame.labels.bev.seg);
  bev["x_offset"] = grid_to_json(frame.labels.bev.x_offset);
  bev["height"] = grid_to_json(frame.labels.bev.height);
  bev["instance"] = grid_to_json_int(frame.labels.bev.instance);
  root["bev"] = std::move(bev);

  return root.dump() + "\n";
}

LabeledFrame parse_labels(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "labels");
  LabeledFrame frame;
  frame.frame_id = jsonu::str(jsonu::field(root, "frame_id", "labels"), "labels.frame_id");
  frame.camera = jsonu::str(jsonu::field(root, "camera", "labels"), "labels.camera");
  const json& t_occ = jsonu::field(root, "t_occ_used", "labels");
  frame.labels.t_occ_used = t_occ.is_null() ? std::numeric_limits<double>::infinity()
                                            : jsonu::num(t_occ, "labels.t_occ_used");

  const json& lines = jsonu::array(jsonu::field(root, "centerlines", "labels"),
                                   "labels.centerlines");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string path = "labels.centerlines[" + std::to_string(i) + "]";
    const json& jl = lines[i];
    CenterlineLabel cl;
    cl.lane_id = jsonu::integer(jsonu::field(jl, "lane_id", path), path + ".lane_id");
    cl.r_occ = jsonu::num(jsonu::field(jl, "r_occ", path), path + ".r_occ");
    cl.n_total = static_cast<std::size_t>(
        jsonu::integer(jsonu::field(jl, "n_total", path), path + ".n_total"));
    cl.n_occluded = static_cast<std::size_t>(
        jsonu::integer(jsonu::field(jl, "n_occluded", path), path + ".n_occluded"));
    const json& kps = jsonu::array(jsonu::field(jl, "keypoints", path), path + ".keypoints");
    for (std::size_t k = 0; k < kps.size(); ++k) {
      const std::string kpath = path + ".keypoints[" + std::to_string(k) + "]";
      const json& jk = kps[k];
      Keypoint kp;
      kp.pixel = {jsonu::num(jsonu::field(jk, "u", kpath), kpath + ".u"),
                  jsonu::num(jsonu::field(jk, "v", kpath), kpath + ".v")};
      kp.p_cam = {jsonu::num(jsonu::field(jk, "x", kpath), kpath + ".x"),
                  jsonu::num(jsonu::field(jk, "y", kpath), kpath + ".y"),
                  jsonu::num(jsonu::field(jk, "z", kpath), kpath + ".z")};
      kp.depth = jsonu::num(jsonu::field(jk, "depth", kpath), kpath + ".depth");
      const std::int64_t cid =
          jsonu::integer(jsonu::field(jk, "class_id", kpath), kpath + ".class_id");
      if (cid < 0 || cid > 255) raise(ErrorCode::schema, kpath + ".class_id out of range");
      kp.class_id = static_cast<std::uint8_t>(cid);
      kp.category = occlusion::category_from_string(
          jsonu::str(jsonu::field(jk, "category", kpath), kpath + ".category"));
      cl.keypoints.push_back(kp);
    }
    const json& spl = jsonu::array(jsonu::field(jl, "spline_2d", path), path + ".spline_2d");
    for (std::size_t k = 0; k < spl.size(); ++k) {
      cl.spline_2d.push_back(jsonu::vec2(spl[k], path + ".spline_2d"));
    }
    frame.labels.centerlines.push_back(std::move(cl));
  }

  const json& bev = jsonu::field(root, "bev", "labels");
  frame.labels.bev.spec = spec_from_json(jsonu::field(bev, "spec", "labels.bev"),
                                         "labels.bev.spec");
  const int rows = frame.labels.bev.spec.rows();
  const int cols = frame.labels.bev.spec.cols();
  frame.labels.bev.seg = grid_from_json_int<std::uint8_t>(
      jsonu::field(bev, "seg", "labels.bev"), rows, cols, "labels.bev.seg");
  frame.labels.bev.x_offset =
      grid_from_json(jsonu::field(bev, "x_offset", "labels.bev"), rows, cols,
                     "labels.bev.x_offset");
  frame.labels.bev.height = grid_from_json(jsonu::field(bev, "height", "labels.bev"), rows, cols,
                                           "labels.bev.height");
  frame.labels.bev.instance = grid_from_json_int<std::uint32_t>(
      jsonu::field(bev, "instance", "labels.bev"), rows, cols, "labels.bev.instance");
  return frame;
}

}  // namespace clf::labelgen
