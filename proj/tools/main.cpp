#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clf/errors.hpp"
#include "clf/ingest/io.hpp"
#include "clf/log.hpp"
#include "commands.hpp"

namespace {

using clf::cli::RunConfig;
using nlohmann::json;

/// Config-file layer: JSON keys fill RunConfig before flag parsing, so the
/// precedence is CLI flags > config file > built-in defaults.
void apply_config_file(RunConfig& config, const std::string& path) {
  json doc = json::parse(clf::ingest::read_file(path));
  // A run manifest nests the effective config; accept it directly.
  if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
  auto num = [&doc](const char* key, double& slot) {
    if (doc.contains(key)) slot = doc[key].get<double>();
  };
  auto str = [&doc](const char* key, std::string& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::string>();
  };
  num("t_occ", config.label_params.t_occ);
  num("spacing", config.label_params.spacing);
  num("max_depth", config.label_params.max_depth);
  num("min_px_gap", config.label_params.min_px_gap);
  num("min_length", config.label_params.min_length);
  num("spline_px_step", config.label_params.spline_px_step);
  if (doc.contains("min_keypoints")) {
    config.label_params.min_keypoints = doc["min_keypoints"].get<std::size_t>();
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    config.grid = {g.at("x_min").get<double>(), g.at("x_max").get<double>(),
                   g.at("y_min").get<double>(), g.at("y_max").get<double>(),
                   g.at("cell").get<double>()};
  }
  num("match_threshold", config.match_spec.match_threshold);
  num("row_step", config.match_spec.row_step);
  num("conf_threshold", config.decode_params.conf_threshold);
  num("embed_radius", config.decode_params.embed_radius);
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("jobs")) config.jobs = doc["jobs"].get<unsigned>();
  str("ontology", config.ontology_path);
  str("map", config.map_path);
  str("trajectory", config.trajectory_path);
  str("calibration", config.calibration_path);
  str("masks", config.masks_dir);
  str("out", config.out);
}

void add_grid_flag(CLI::App* cmd, std::vector<double>& slot) {
  cmd->add_option("--grid", slot,
                  "BEV grid as x_min,x_max,y_min,y_max,cell (meters)")
      ->delimiter(',')
      ->expected(0, 5);
}

void apply_grid(const std::vector<double>& values, RunConfig& config) {
  if (values.empty()) return;
  if (values.size() != 5) {
    clf::raise(clf::ErrorCode::invalid_argument, "--grid needs 5 comma-separated numbers");
  }
  config.grid = {values[0], values[1], values[2], values[3], values[4]};
}

void apply_band(const std::vector<double>& values, double& lo, double& hi, const char* name) {
  if (values.empty()) return;
  if (values.size() != 2) {
    clf::raise(clf::ErrorCode::invalid_argument, std::string(name) + " needs lo,hi");
  }
  lo = values[0];
  hi = values[1];
}

clf::occlusion::Category parse_category(const std::string& s) {
  return clf::occlusion::category_from_string(s);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  std::string config_path;

  // Config file is applied before flag binding so flags win.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "clf: bad config file: %s\n", e.what());
    return 2;
  }

  CLI::App app{"centerline label factory: occlusion-aware 2D/3D centerline labels, "
               "BEV supervision targets, decoding and benchmarking"};
  app.set_help_all_flag("--help-all");
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  std::vector<double> grid_values, near_values, far_values;
  std::vector<std::string> occluder_specs;

  auto* generate = app.add_subcommand("generate", "project map lanes into labels per frame");
  generate->add_option("--map", config.map_path, "vector map (.cmap.json)");
  generate->add_option("--trajectory", config.trajectory_path, "ego trajectory (.traj.json)");
  generate->add_option("--calibration", config.calibration_path, "camera set (.calib.json)");
  generate->add_option("--masks", config.masks_dir, "directory of .smask rasters");
  generate->add_option("--out", config.out, "output directory");
  generate->add_option("--ontology", config.ontology_path, "ontology config (.ontology.json)");
  generate->add_option("--t-occ", config.label_params.t_occ, "occlusion removal threshold");
  add_grid_flag(generate, grid_values);
  generate->add_option("--spacing", config.label_params.spacing, "3D resample step, m");
  generate->add_option("--max-depth", config.label_params.max_depth, "depth cutoff, m");
  generate->add_option("--min-px-gap", config.label_params.min_px_gap, "pixel decimation gap");
  generate->add_option("--min-keypoints", config.label_params.min_keypoints);
  generate->add_option("--min-length", config.label_params.min_length, "min arc length, m");
  generate->add_option("--spline-step", config.label_params.spline_px_step);
  generate->add_option("--jobs", config.jobs, "worker threads");

  auto* sample = app.add_subcommand("sample-train", "one random frame per window");
  sample->add_option("--trajectory", config.trajectory_path);
  std::size_t frame_count = 0;
  auto* frames_opt = sample->add_option("--frames", frame_count, "frame count");
  sample->add_option("--window", config.window, "window size (frames)");
  sample->add_option("--seed", config.seed);
  sample->add_option("--out", config.out, "output split file");

  auto* filter = app.add_subcommand("filter", "re-apply an occlusion threshold to labels");
  filter->add_option("--labels", config.labels_dir, "input label directory")->required();
  filter->add_option("--t-occ", config.label_params.t_occ, "new threshold")->required();
  filter->add_option("--out", config.out, "output directory")->required();
  filter->add_option("--jobs", config.jobs);

  auto* decode = app.add_subcommand("decode", "head outputs -> centerline polylines");
  decode->add_option("--bevout", config.bevout_dir, "directory of .bevout files")->required();
  decode->add_option("--out", config.out, "output directory")->required();
  add_grid_flag(decode, grid_values);
  decode->add_option("--conf-threshold", config.decode_params.conf_threshold);
  decode->add_option("--embed-radius", config.decode_params.embed_radius);
  decode->add_option("--min-cells", config.decode_params.min_cells);
  decode->add_option("--jobs", config.jobs);

  auto* eval_cmd = app.add_subcommand("eval", "precision/recall/F1 and X/Z errors");
  eval_cmd->add_option("--pred", config.pred_dir, "predicted .lanes.json directory")->required();
  eval_cmd->add_option("--gt", config.gt_dir, "ground truth directory (.lanes/.clabel)")
      ->required();
  eval_cmd->add_option("--out", config.out, "report path");
  eval_cmd->add_option("--match-threshold", config.match_spec.match_threshold, "meters");
  eval_cmd->add_option("--near", near_values, "near band lo,hi (m)")->delimiter(',');
  eval_cmd->add_option("--far", far_values, "far band lo,hi (m)")->delimiter(',');
  eval_cmd->add_option("--row-step", config.match_spec.row_step);
  eval_cmd->add_option("--jobs", config.jobs);

  auto* render = app.add_subcommand("render", "SVG overlays of labels");
  render->add_option("--labels", config.labels_dir)->required();
  render->add_option("--out", config.out, "output directory")->required();
  render->add_option("--calibration", config.calibration_path, "for canvas sizes");
  render->add_option("--width", config.canvas_width, "canvas fallback width");
  render->add_option("--height", config.canvas_height, "canvas fallback height");
  render->add_option("--jobs", config.jobs);

  auto* stats = app.add_subcommand("stats", "dataset summary for a label directory");
  stats->add_option("--labels", config.labels_dir)->required();
  stats->add_option("--splits", config.splits_path, "split manifest for per-split counts");
  stats->add_option("--out", config.out, "output path");

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene bundle with oracle labels");
  synth->add_option("--out", config.out, "bundle directory")->required();
  synth->add_option("--lanes", config.scene.n_lanes);
  synth->add_option("--frames", config.scene.n_frames);
  synth->add_option("--seed", config.scene.seed);
  synth->add_option("--curvature", config.scene.curvature, "1/m");
  synth->add_option("--lane-length", config.scene.lane_length, "m");
  synth->add_option("--lane-spacing", config.scene.lane_spacing, "m");
  synth->add_option("--ego-speed", config.scene.ego_speed, "m/s");
  synth->add_option("--occluder", occluder_specs,
                    "lane,start_frac,end_frac,category (repeatable)");
  synth->add_option("--ontology", config.ontology_path);
  synth->add_option("--t-occ", config.label_params.t_occ);
  add_grid_flag(synth, grid_values);

  app.require_subcommand(1);

  // --config is legal both before and after the subcommand name.
  for (auto* cmd : {generate, sample, filter, decode, eval_cmd, render, stats, synth}) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    apply_grid(grid_values, config);
    apply_band(near_values, config.match_spec.near_lo, config.match_spec.near_hi, "--near");
    apply_band(far_values, config.match_spec.far_lo, config.match_spec.far_hi, "--far");
    if (frames_opt->count() > 0) config.frame_count = frame_count;
    for (const std::string& spec : occluder_specs) {
      // lane,start,end,category
      clf::synth::Occluder occ;
      char category[32] = {0};
      if (std::sscanf(spec.c_str(), "%zu,%lf,%lf,%31s", &occ.lane_index, &occ.start_frac,
                      &occ.end_frac, category) != 4) {
        clf::raise(clf::ErrorCode::invalid_argument,
                   "--occluder expects lane,start_frac,end_frac,category: " + spec);
      }
      occ.category = parse_category(category);
      config.scene.occluders.push_back(occ);
    }

    if (generate->parsed()) return clf::cli::cmd_generate(config);
    if (sample->parsed()) return clf::cli::cmd_sample_train(config);
    if (filter->parsed()) return clf::cli::cmd_filter(config);
    if (decode->parsed()) return clf::cli::cmd_decode(config);
    if (eval_cmd->parsed()) return clf::cli::cmd_eval(config);
    if (render->parsed()) return clf::cli::cmd_render(config);
    if (stats->parsed()) return clf::cli::cmd_stats(config);
    if (synth->parsed()) return clf::cli::cmd_synth(config);
  } catch (const clf::Error& e) {
    std::fprintf(stderr, "clf: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "clf: unexpected error: %s\n", e.what());
    return 3;
  }
  return 0;
}
