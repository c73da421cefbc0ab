#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "clf/errors.hpp"
#include "clf/eval/io.hpp"
#include "clf/heads/decode.hpp"
#include "clf/heads/head_output.hpp"
#include "clf/ingest/io.hpp"
#include "clf/labelgen/label_io.hpp"
#include "clf/labelgen/sampler.hpp"
#include "clf/log.hpp"
#include "svg.hpp"

namespace clf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

occlusion::Ontology load_ontology(const RunConfig& config) {
  if (config.ontology_path.empty()) return occlusion::Ontology::builtin_default();
  return occlusion::Ontology::parse(ingest::read_file(config.ontology_path));
}

/// Directory listing filtered by suffix, sorted by filename.
std::vector<fs::path> list_files(const fs::path& dir, const std::string& suffix) {
  if (!fs::is_directory(dir)) {
    raise(ErrorCode::io_error, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string strip_suffix(const std::string& name, const std::string& suffix) {
  return name.substr(0, name.size() - suffix.size());
}

/// Index-dispatched worker pool; output slots are keyed by index so the
/// results are identical at any parallelism degree.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  threads.reserve(count);
  for (unsigned t = 0; t < count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

/// Hash of a set of output files, order-independent via sorted names.
std::string hash_outputs(const fs::path& dir, const std::string& suffix) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const fs::path& p : list_files(dir, suffix)) {
    h = fnv1a64(p.filename().string(), h);
    h = fnv1a64(ingest::read_file(p), h);
  }
  return hex64(h);
}

json grid_json(const labelgen::BevGridSpec& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
          {"y_max", g.y_max}, {"cell", g.cell}};
}

/// Effective config in the same flat schema --config accepts, so a manifest's
/// config block replays the run as-is.
json effective_config_json(const RunConfig& c) {
  json out;
  out["map"] = c.map_path;
  out["trajectory"] = c.trajectory_path;
  out["calibration"] = c.calibration_path;
  out["masks"] = c.masks_dir;
  out["ontology"] = c.ontology_path;
  out["out"] = c.out;
  out["grid"] = grid_json(c.grid);
  out["spacing"] = c.label_params.spacing;
  out["max_depth"] = c.label_params.max_depth;
  out["min_px_gap"] = c.label_params.min_px_gap;
  out["min_keypoints"] = c.label_params.min_keypoints;
  out["min_length"] = c.label_params.min_length;
  out["spline_px_step"] = c.label_params.spline_px_step;
  out["t_occ"] = c.label_params.t_occ;
  out["jobs"] = c.jobs;
  return out;
}

std::string frame_id_of(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

}  // namespace

int cmd_generate(const RunConfig& config) {
  for (const auto& [value, flag] :
       {std::pair<const std::string&, const char*>{config.map_path, "--map"},
        {config.trajectory_path, "--trajectory"},
        {config.calibration_path, "--calibration"},
        {config.masks_dir, "--masks"},
        {config.out, "--out"}}) {
    if (value.empty()) {
      raise(ErrorCode::invalid_argument,
            std::string("generate needs ") + flag + " (flag or config file)");
    }
  }
  config.label_params.validate();
  config.grid.validate();
  const auto ontology = load_ontology(config);
  const auto map = ingest::parse_map(ingest::read_file(config.map_path));
  const auto trajectory =
      ingest::parse_trajectory(ingest::read_file(config.trajectory_path));
  const auto cameras = ingest::parse_calibration(ingest::read_file(config.calibration_path));
  if (cameras.empty()) raise(ErrorCode::schema, "calibration lists no cameras");
  const fs::path out_dir(config.out.empty() ? "." : config.out);
  fs::create_directories(out_dir);

  struct Task {
    std::size_t frame;
    std::size_t camera;
  };
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < trajectory.size(); ++f) {
    for (std::size_t c = 0; c < cameras.size(); ++c) tasks.push_back({f, c});
  }

  std::vector<std::vector<labelgen::CandidateStat>> stats(tasks.size());
  std::vector<std::size_t> retained_counts(tasks.size(), 0);

  parallel_for(tasks.size(), config.jobs, [&](std::size_t i) {
    const auto [f, c] = tasks[i];
    const auto& cam = cameras[c];
    const std::string stem = "frame_" + frame_id_of(f) + "_" + cam.name();
    const fs::path mask_path = fs::path(config.masks_dir) / (stem + ".smask");
    const auto mask = ingest::parse_mask(ingest::read_file(mask_path));
    const geom::Pose ego = trajectory.at(f);
    auto labels = labelgen::generate_frame(map, ego, cam, mask, ontology, config.label_params,
                                           config.grid);
    stats[i] = labels.candidates;
    retained_counts[i] = labels.centerlines.size();
    labelgen::LabeledFrame lf{frame_id_of(f), cam.name(), std::move(labels)};
    ingest::write_file(out_dir / (stem + ".clabel.json"), labelgen::serialize_labels(lf));
  });

  // Manifest: config echo, counts, retention ladder, output hash.
  std::size_t total_candidates = 0, total_retained = 0;
  json ladder;
  for (int step = 1; step <= 10; ++step) {
    const double t = 0.1 * step;
    std::size_t kept = 0;
    for (const auto& frame_stats : stats) {
      for (const auto& cand : frame_stats) {
        if (cand.r_occ < t && cand.n_final >= config.label_params.min_keypoints) ++kept;
      }
    }
    char key[8];
    std::snprintf(key, sizeof(key), "%.1f", t);
    ladder[key] = kept;
  }
  for (const auto& frame_stats : stats) total_candidates += frame_stats.size();
  for (const std::size_t n : retained_counts) total_retained += n;

  json manifest;
  manifest["command"] = "generate";
  manifest["config"] = effective_config_json(config);
  manifest["n_frames"] = trajectory.size();
  json camera_names = json::array();
  for (const auto& cam : cameras) camera_names.push_back(cam.name());
  manifest["cameras"] = camera_names;
  manifest["centerline_candidates"] = total_candidates;
  manifest["centerlines_retained"] = total_retained;
  manifest["retained_per_t_occ"] = ladder;
  manifest["output_hash"] = hash_outputs(out_dir, ".clabel.json");
  ingest::write_file(out_dir / "manifest.json", manifest.dump() + "\n");
  log::info("generate: " + std::to_string(total_retained) + " centerlines over " +
            std::to_string(tasks.size()) + " frame-camera pairs");
  return 0;
}

int cmd_sample_train(const RunConfig& config) {
  std::size_t n_frames = 0;
  if (config.frame_count) {
    n_frames = *config.frame_count;
  } else if (!config.trajectory_path.empty()) {
    n_frames = ingest::parse_trajectory(ingest::read_file(config.trajectory_path)).size();
  } else {
    raise(ErrorCode::invalid_argument, "sample-train needs --frames or --trajectory");
  }
  const auto picks = labelgen::sample_train_frames(n_frames, config.window, config.seed);
  json out;
  out["window"] = config.window;
  out["seed"] = config.seed;
  out["n_frames"] = n_frames;
  json ids = json::array();
  for (const std::size_t f : picks) ids.push_back(frame_id_of(f));
  out["splits"] = {{"train", ids}};
  const fs::path out_path(config.out.empty() ? "train_split.json" : config.out);
  ingest::write_file(out_path, out.dump() + "\n");
  log::info("sample-train: " + std::to_string(picks.size()) + " frames");
  return 0;
}

int cmd_filter(const RunConfig& config) {
  const double t_occ = config.label_params.t_occ;
  const fs::path out_dir(config.out.empty() ? "." : config.out);
  fs::create_directories(out_dir);
  const auto files = list_files(config.labels_dir, ".clabel.json");
  if (files.empty()) raise(ErrorCode::io_error, "no .clabel.json files in " + config.labels_dir);

  parallel_for(files.size(), config.jobs, [&](std::size_t i) {
    auto frame = labelgen::parse_labels(ingest::read_file(files[i]));
    if (t_occ > frame.labels.t_occ_used) {
      log::warn(files[i].filename().string() +
                ": raising t_occ beyond the recorded threshold cannot restore removed lines");
    }
    // Drop lines at r_occ >= t_occ and remap the BEV instance ids of the
    // survivors onto their new positions.
    std::vector<std::uint32_t> new_id(frame.labels.centerlines.size() + 1, 0);
    std::vector<labelgen::CenterlineLabel> kept;
    for (std::size_t k = 0; k < frame.labels.centerlines.size(); ++k) {
      if (frame.labels.centerlines[k].r_occ >= t_occ) continue;
      new_id[k + 1] = static_cast<std::uint32_t>(kept.size() + 1);
      kept.push_back(std::move(frame.labels.centerlines[k]));
    }
    auto& bev = frame.labels.bev;
    for (int r = 0; r < bev.seg.rows(); ++r) {
      for (int c = 0; c < bev.seg.cols(); ++c) {
        const std::uint32_t id = bev.instance.at(r, c);
        if (id == 0) continue;
        if (id >= new_id.size() || new_id[id] == 0) {
          bev.seg.at(r, c) = 0;
          bev.x_offset.at(r, c) = labelgen::BevTargets::kUndefined;
          bev.height.at(r, c) = labelgen::BevTargets::kUndefined;
          bev.instance.at(r, c) = 0;
        } else {
          bev.instance.at(r, c) = new_id[id];
        }
      }
    }
    frame.labels.centerlines = std::move(kept);
    frame.labels.t_occ_used = t_occ;
    ingest::write_file(out_dir / files[i].filename(), labelgen::serialize_labels(frame));
  });
  log::info("filter: rewrote " + std::to_string(files.size()) + " label files at t_occ=" +
            std::to_string(t_occ));
  return 0;
}

int cmd_decode(const RunConfig& config) {
  config.grid.validate();
  const fs::path out_dir(config.out.empty() ? "." : config.out);
  fs::create_directories(out_dir);
  const auto files = list_files(config.bevout_dir, ".bevout");
  if (files.empty()) raise(ErrorCode::io_error, "no .bevout files in " + config.bevout_dir);
  parallel_for(files.size(), config.jobs, [&](std::size_t i) {
    const auto head = heads::parse_bevout(ingest::read_file(files[i]));
    const auto lanes = heads::decode_bev(head, config.grid, config.decode_params);
    const std::string stem = strip_suffix(files[i].filename().string(), ".bevout");
    eval::FrameLanes out{stem, lanes};
    ingest::write_file(out_dir / (stem + ".lanes.json"), eval::serialize_lanes(out));
  });
  log::info("decode: " + std::to_string(files.size()) + " frames");
  return 0;
}

namespace {

/// Ground-truth polylines per frame stem: either decoded .lanes.json or the
/// BEV block of .clabel.json files.
std::map<std::string, std::vector<eval::Polyline3>> load_gt(const std::string& dir) {
  std::map<std::string, std::vector<eval::Polyline3>> gt;
  for (const fs::path& p : list_files(dir, ".lanes.json")) {
    const auto lanes = eval::parse_lanes(ingest::read_file(p));
    gt[strip_suffix(p.filename().string(), ".lanes.json")] = lanes.lanes;
  }
  for (const fs::path& p : list_files(dir, ".clabel.json")) {
    const auto frame = labelgen::parse_labels(ingest::read_file(p));
    gt[strip_suffix(p.filename().string(), ".clabel.json")] =
        labelgen::bev_to_polylines(frame.labels.bev);
  }
  return gt;
}

}  // namespace

int cmd_eval(const RunConfig& config) {
  config.match_spec.validate();
  const auto gt = load_gt(config.gt_dir);
  const auto pred_files = list_files(config.pred_dir, ".lanes.json");
  if (pred_files.empty()) {
    raise(ErrorCode::io_error, "no .lanes.json files in " + config.pred_dir);
  }

  std::vector<eval::FrameMetrics> frames(pred_files.size());
  std::vector<eval::MetricsAccumulator> partials(pred_files.size());
  parallel_for(pred_files.size(), config.jobs, [&](std::size_t i) {
    const std::string stem = strip_suffix(pred_files[i].filename().string(), ".lanes.json");
    const auto it = gt.find(stem);
    if (it == gt.end()) {
      raise(ErrorCode::io_error, "no ground truth for frame '" + stem + "' in " + config.gt_dir);
    }
    const auto pred = eval::parse_lanes(ingest::read_file(pred_files[i]));
    const auto assignment = eval::match(pred.lanes, it->second, config.match_spec);
    frames[i] = {stem, eval::score(assignment, config.match_spec)};
    partials[i].add(assignment, config.match_spec);
  });
  eval::MetricsAccumulator corpus;
  for (const auto& partial : partials) corpus.merge(partial);

  const std::string report = eval::serialize_report(config.match_spec, frames, corpus.report());
  const fs::path out_path(config.out.empty() ? "report.json" : config.out);
  ingest::write_file(out_path, report);
  const auto total = corpus.report();
  log::info("eval: F1=" + std::to_string(total.f1) + " over " + std::to_string(frames.size()) +
            " frames");
  return 0;
}

int cmd_render(const RunConfig& config) {
  const fs::path out_dir(config.out.empty() ? "." : config.out);
  fs::create_directories(out_dir);
  const auto files = list_files(config.labels_dir, ".clabel.json");
  if (files.empty()) raise(ErrorCode::io_error, "no .clabel.json files in " + config.labels_dir);

  int width = config.canvas_width;
  int height = config.canvas_height;
  std::map<std::string, std::pair<int, int>> camera_dims;
  if (!config.calibration_path.empty()) {
    for (const auto& cam :
         ingest::parse_calibration(ingest::read_file(config.calibration_path))) {
      camera_dims[cam.name()] = {cam.width(), cam.height()};
    }
  }

  parallel_for(files.size(), config.jobs, [&](std::size_t i) {
    const auto frame = labelgen::parse_labels(ingest::read_file(files[i]));
    int w = width, h = height;
    if (const auto it = camera_dims.find(frame.camera); it != camera_dims.end()) {
      w = it->second.first;
      h = it->second.second;
    }
    const std::string stem = strip_suffix(files[i].filename().string(), ".clabel.json");
    ingest::write_file(out_dir / (stem + ".svg"), render_label_svg(frame, w, h));
  });
  log::info("render: " + std::to_string(files.size()) + " SVG overlays");
  return 0;
}

int cmd_stats(const RunConfig& config) {
  const auto files = list_files(config.labels_dir, ".clabel.json");
  if (files.empty()) raise(ErrorCode::io_error, "no .clabel.json files in " + config.labels_dir);

  std::size_t n_centerlines = 0, n_keypoints = 0;
  std::array<std::size_t, 10> histogram{};
  std::set<std::string> frame_ids;
  for (const fs::path& p : files) {
    const auto frame = labelgen::parse_labels(ingest::read_file(p));
    frame_ids.insert(frame.frame_id);
    n_centerlines += frame.labels.centerlines.size();
    for (const auto& line : frame.labels.centerlines) {
      n_keypoints += line.keypoints.size();
      const int bin = std::min(9, static_cast<int>(line.r_occ * 10.0));
      histogram[static_cast<std::size_t>(bin)] += 1;
    }
  }

  json out;
  out["n_label_files"] = files.size();
  out["n_frames"] = frame_ids.size();
  out["n_centerlines"] = n_centerlines;
  out["n_keypoints"] = n_keypoints;
  json hist = json::array();
  for (const std::size_t count : histogram) hist.push_back(count);
  out["r_occ_histogram"] = hist;

  if (!config.splits_path.empty()) {
    const json splits_doc = json::parse(ingest::read_file(config.splits_path));
    if (!splits_doc.contains("splits") || !splits_doc["splits"].is_object()) {
      raise(ErrorCode::schema, "splits file must carry a 'splits' object");
    }
    json per_split;
    std::size_t total = 0;
    for (const auto& [name, ids] : splits_doc["splits"].items()) {
      per_split[name] = ids.size();
      total += ids.size();
    }
    out["split_counts"] = per_split;
    out["split_total"] = total;
  }

  const fs::path out_path(config.out.empty() ? "stats.json" : config.out);
  ingest::write_file(out_path, out.dump() + "\n");
  log::info("stats: " + std::to_string(n_centerlines) + " centerlines in " +
            std::to_string(files.size()) + " files");
  return 0;
}

int cmd_synth(const RunConfig& config) {
  const auto ontology = load_ontology(config);
  const auto bundle = synth::generate(config.scene, ontology, config.label_params, config.grid);
  const fs::path out_dir(config.out.empty() ? "synth_bundle" : config.out);
  synth::write_bundle(bundle, out_dir);
  log::info("synth: wrote " + std::to_string(bundle.masks.size()) + " frames to " +
            out_dir.string());
  return 0;
}

}  // namespace clf::cli
