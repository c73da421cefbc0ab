#include "clf/eval/io.hpp"

#include "../json_util.hpp"

namespace clf::eval {

using jsonu::json;

namespace {

json spec_to_json(const MatchSpec& spec) {
  json j;
  j["match_threshold"] = spec.match_threshold;
  j["near"] = json::array({spec.near_lo, spec.near_hi});
  j["far"] = json::array({spec.far_lo, spec.far_hi});
  j["row_step"] = spec.row_step;
  return j;
}

json report_to_json(const MetricsReport& r) {
  json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["x_err_near"] = opt(r.x_err_near);
  j["x_err_far"] = opt(r.x_err_far);
  j["z_err_near"] = opt(r.z_err_near);
  j["z_err_far"] = opt(r.z_err_far);
  j["degenerate"] = r.degenerate;
  return j;
}

}  // namespace

std::string serialize_report(const MatchSpec& spec, const std::vector<FrameMetrics>& frames,
                             const MetricsReport& corpus) {
  json root;
  root["match_spec"] = spec_to_json(spec);
  root["error_averaging"] = "matched_points";
  json jf = json::array();
  for (const auto& frame : frames) {
    json row = report_to_json(frame.metrics);
    row["frame_id"] = frame.frame_id;
    jf.push_back(std::move(row));
  }
  root["frames"] = std::move(jf);
  root["corpus"] = report_to_json(corpus);
  return root.dump() + "\n";
}

std::string serialize_lanes(const FrameLanes& lanes) {
  json root;
  root["frame_id"] = lanes.frame_id;
  json arr = json::array();
  for (const auto& lane : lanes.lanes) arr.push_back(jsonu::from_polyline3(lane));
  root["lanes"] = std::move(arr);
  return root.dump() + "\n";
}

FrameLanes parse_lanes(std::string_view bytes) {
  const json root = jsonu::parse(bytes, "lanes");
  FrameLanes out;
  out.frame_id = jsonu::str(jsonu::field(root, "frame_id", "lanes"), "lanes.frame_id");
  const json& arr = jsonu::array(jsonu::field(root, "lanes", "lanes"), "lanes.lanes");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.lanes.push_back(jsonu::polyline3(arr[i], "lanes.lanes[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace clf::eval
