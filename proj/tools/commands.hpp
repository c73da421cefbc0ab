#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clf/eval/metrics.hpp"
#include "clf/heads/decode.hpp"
#include "clf/labelgen/bev.hpp"
#include "clf/labelgen/pipeline.hpp"
#include "clf/synth/scene.hpp"

namespace clf::cli {

/// Everything a run needs; populated from flags with config-file and
/// built-in-default precedence handled by main().
struct RunConfig {
  // inputs
  std::string map_path;
  std::string trajectory_path;
  std::string calibration_path;
  std::string masks_dir;
  std::string labels_dir;
  std::string bevout_dir;
  std::string pred_dir;
  std::string gt_dir;
  std::string splits_path;
  std::string ontology_path;  // empty = builtin default ontology

  std::string out;  // output dir or file depending on the command

  labelgen::LabelParams label_params;
  labelgen::BevGridSpec grid;
  eval::MatchSpec match_spec;
  heads::DecodeParams decode_params;

  std::uint64_t seed = 0;
  std::size_t window = 20;
  std::optional<std::size_t> frame_count;  // sample-train without a trajectory
  unsigned jobs = 1;

  // render canvas fallback when no calibration is given
  int canvas_width = 1024;
  int canvas_height = 576;

  synth::SceneSpec scene;
};

int cmd_generate(const RunConfig& config);
int cmd_sample_train(const RunConfig& config);
int cmd_filter(const RunConfig& config);
int cmd_decode(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_render(const RunConfig& config);
int cmd_stats(const RunConfig& config);
int cmd_synth(const RunConfig& config);

}  // namespace clf::cli
