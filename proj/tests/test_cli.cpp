#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "clf/eval/io.hpp"
#include "clf/ingest/io.hpp"
#include "clf/labelgen/bev.hpp"
#include "clf/labelgen/label_io.hpp"
#include "test_support.hpp"

using namespace clf;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult run_clf(const std::string& args, const fs::path& workdir) {
  const fs::path out = workdir / "cmd_stdout.txt";
  const fs::path err = workdir / "cmd_stderr.txt";
  const std::string cmd = std::string(CLF_BIN) + " " + args + " > " + out.string() + " 2> " +
                          err.string();
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  if (fs::exists(out)) result.stdout_text = ingest::read_file(out);
  if (fs::exists(err)) result.stderr_text = ingest::read_file(err);
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string bundle_args(const fs::path& bundle, const fs::path& out) {
  return "generate --map " + (bundle / "map.cmap.json").string() + " --trajectory " +
         (bundle / "ego.traj.json").string() + " --calibration " +
         (bundle / "cameras.calib.json").string() + " --masks " + (bundle / "masks").string() +
         " --ontology " + (bundle / "ontology.ontology.json").string() + " --out " + out.string();
}

}  // namespace

TEST_CASE("cli: synth then generate produces labels and a manifest") {
  const fs::path work = fresh_dir("clf_cli_generate");
  const fs::path bundle = work / "bundle";
  const fs::path labels = work / "labels";

  auto synth = run_clf("synth --out " + bundle.string() +
                           " --lanes 3 --frames 2 --seed 5 --occluder 1,0.0,0.3,invalid",
                       work);
  REQUIRE(synth.exit_code == 0);
  CHECK(fs::exists(bundle / "map.cmap.json"));
  CHECK(fs::exists(bundle / "masks" / "frame_000001_forward.smask"));
  CHECK(fs::exists(bundle / "expected" / "frame_000000_forward.clabel.json"));

  auto gen = run_clf(bundle_args(bundle, labels) + " --t-occ 0.4 --jobs 2", work);
  REQUIRE(gen.exit_code == 0);
  CHECK(fs::exists(labels / "frame_000000_forward.clabel.json"));
  CHECK(fs::exists(labels / "frame_000001_forward.clabel.json"));

  const json manifest = json::parse(ingest::read_file(labels / "manifest.json"));
  CHECK(manifest["command"] == "generate");
  CHECK(manifest["n_frames"] == 2);
  CHECK(manifest["config"]["t_occ"] == 0.4);
  CHECK(manifest["centerlines_retained"].get<int>() > 0);
  CHECK(manifest["output_hash"].is_string());

  // the labels parse and carry the configured threshold
  const auto frame =
      labelgen::parse_labels(ingest::read_file(labels / "frame_000000_forward.clabel.json"));
  CHECK(frame.labels.t_occ_used == 0.4);
  fs::remove_all(work);
}

TEST_CASE("cli: a missing calibration file exits 2 and names the path") {
  const fs::path work = fresh_dir("clf_cli_missing");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() + " --lanes 1 --frames 1", work).exit_code ==
          0);
  const std::string args = "generate --map " + (bundle / "map.cmap.json").string() +
                           " --trajectory " + (bundle / "ego.traj.json").string() +
                           " --calibration " + (bundle / "nope.calib.json").string() +
                           " --masks " + (bundle / "masks").string() + " --out " +
                           (work / "labels").string();
  const auto result = run_clf(args, work);
  CHECK(result.exit_code == 2);
  CHECK(result.stderr_text.find("nope.calib.json") != std::string::npos);
  fs::remove_all(work);
}

TEST_CASE("cli: rerunning generate with the same config gives an identical manifest hash") {
  const fs::path work = fresh_dir("clf_cli_rerun");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 3 --frames 3 --seed 11 --occluder 0,0.2,0.6,occlusion_valid",
                  work)
              .exit_code == 0);
  const fs::path out1 = work / "labels1";
  const fs::path out2 = work / "labels2";
  REQUIRE(run_clf(bundle_args(bundle, out1) + " --jobs 4", work).exit_code == 0);
  REQUIRE(run_clf(bundle_args(bundle, out2) + " --jobs 1", work).exit_code == 0);
  const json m1 = json::parse(ingest::read_file(out1 / "manifest.json"));
  const json m2 = json::parse(ingest::read_file(out2 / "manifest.json"));
  CHECK(m1["output_hash"] == m2["output_hash"]);
  // and the label bytes themselves agree across parallelism degrees
  CHECK(ingest::read_file(out1 / "frame_000002_forward.clabel.json") ==
        ingest::read_file(out2 / "frame_000002_forward.clabel.json"));
  fs::remove_all(work);
}

TEST_CASE("cli: retention differs across t_occ per the monotonicity expectation") {
  const fs::path work = fresh_dir("clf_cli_tocc");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 3 --frames 1 --occluder 1,0.0,0.3,invalid",
                  work)
              .exit_code == 0);
  const fs::path strict = work / "strict";
  const fs::path lax = work / "lax";
  REQUIRE(run_clf(bundle_args(bundle, strict) + " --t-occ 0.2", work).exit_code == 0);
  REQUIRE(run_clf(bundle_args(bundle, lax) + " --t-occ 1.0", work).exit_code == 0);
  const json ms = json::parse(ingest::read_file(strict / "manifest.json"));
  const json ml = json::parse(ingest::read_file(lax / "manifest.json"));
  CHECK(ms["centerlines_retained"].get<int>() < ml["centerlines_retained"].get<int>());
  // the ladder is shared (it does not depend on the applied threshold)
  CHECK(ms["retained_per_t_occ"] == ml["retained_per_t_occ"]);
  fs::remove_all(work);
}

TEST_CASE("cli: filter rewrites labels at a stricter threshold") {
  const fs::path work = fresh_dir("clf_cli_filter");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 3 --frames 1 --occluder 1,0.0,0.3,invalid",
                  work)
              .exit_code == 0);
  const fs::path labels = work / "labels";
  REQUIRE(run_clf(bundle_args(bundle, labels) + " --t-occ 1.0", work).exit_code == 0);
  const fs::path filtered = work / "filtered";
  REQUIRE(run_clf("filter --labels " + labels.string() + " --t-occ 0.2 --out " +
                      filtered.string(),
                  work)
              .exit_code == 0);
  const auto before =
      labelgen::parse_labels(ingest::read_file(labels / "frame_000000_forward.clabel.json"));
  const auto after =
      labelgen::parse_labels(ingest::read_file(filtered / "frame_000000_forward.clabel.json"));
  CHECK(after.labels.t_occ_used == 0.2);
  CHECK(after.labels.centerlines.size() < before.labels.centerlines.size());
  for (const auto& line : after.labels.centerlines) CHECK(line.r_occ < 0.2);
  // BEV instances were remapped onto the surviving lines
  std::uint32_t max_id = 0;
  for (const auto id : after.labels.bev.instance.data()) max_id = std::max(max_id, id);
  CHECK(max_id == after.labels.centerlines.size());
  fs::remove_all(work);
}

TEST_CASE("cli: sample-train draws one frame per window with a seedable RNG") {
  const fs::path work = fresh_dir("clf_cli_sample");
  const fs::path split1 = work / "s1.json";
  const fs::path split2 = work / "s2.json";
  REQUIRE(run_clf("sample-train --frames 40 --window 20 --seed 3 --out " + split1.string(),
                  work)
              .exit_code == 0);
  const json s1 = json::parse(ingest::read_file(split1));
  CHECK(s1["window"] == 20);
  REQUIRE(s1["splits"]["train"].size() == 2);
  REQUIRE(run_clf("sample-train --frames 40 --window 20 --seed 3 --out " + split2.string(),
                  work)
              .exit_code == 0);
  CHECK(ingest::read_file(split1) == ingest::read_file(split2));
  fs::remove_all(work);
}

TEST_CASE("cli: decode and eval close the loop at F1 = 1") {
  const fs::path work = fresh_dir("clf_cli_eval");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() + " --lanes 3 --frames 2 --seed 2", work)
              .exit_code == 0);
  const fs::path labels = work / "labels";
  REQUIRE(run_clf(bundle_args(bundle, labels), work).exit_code == 0);

  // Predictions straight from the ground-truth BEV blocks.
  const fs::path pred = work / "pred";
  fs::create_directories(pred);
  for (const auto& name : {"frame_000000_forward", "frame_000001_forward"}) {
    const auto frame = labelgen::parse_labels(
        ingest::read_file(labels / (std::string(name) + ".clabel.json")));
    eval::FrameLanes lanes{name, labelgen::bev_to_polylines(frame.labels.bev)};
    ingest::write_file(pred / (std::string(name) + ".lanes.json"),
                       eval::serialize_lanes(lanes));
  }

  const fs::path report_path = work / "report.json";
  REQUIRE(run_clf("eval --pred " + pred.string() + " --gt " + labels.string() + " --out " +
                      report_path.string(),
                  work)
              .exit_code == 0);
  const json report = json::parse(ingest::read_file(report_path));
  CHECK(report["corpus"]["f1"] == 1.0);
  CHECK(report["corpus"]["x_err_near"].get<double>() == 0.0);
  CHECK(report["match_spec"]["match_threshold"] == 1.5);
  CHECK(report["frames"].size() == 2);
  fs::remove_all(work);
}

TEST_CASE("cli: render emits well-formed SVG") {
  const fs::path work = fresh_dir("clf_cli_render");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 2 --frames 1 --occluder 0,0.4,0.6,occlusion_valid",
                  work)
              .exit_code == 0);
  const fs::path labels = work / "labels";
  REQUIRE(run_clf(bundle_args(bundle, labels), work).exit_code == 0);
  const fs::path svg_dir = work / "svg";
  REQUIRE(run_clf("render --labels " + labels.string() + " --calibration " +
                      (bundle / "cameras.calib.json").string() + " --out " + svg_dir.string(),
                  work)
              .exit_code == 0);
  const std::string svg = ingest::read_file(svg_dir / "frame_000000_forward.svg");
  const std::string problem = test::check_xml_well_formed(svg);
  CHECK_MESSAGE(problem.empty(), problem);
  CHECK(svg.find("<svg") != std::string::npos);
  fs::remove_all(work);
}

TEST_CASE("cli: stats reports per-split counts that sum to the total") {
  const fs::path work = fresh_dir("clf_cli_stats");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() + " --lanes 2 --frames 6", work).exit_code ==
          0);
  const fs::path labels = work / "labels";
  REQUIRE(run_clf(bundle_args(bundle, labels), work).exit_code == 0);

  json splits;
  splits["splits"] = {{"train", {"000000", "000001", "000002", "000003"}},
                      {"val", {"000004"}},
                      {"test", {"000005"}}};
  const fs::path splits_path = work / "splits.json";
  ingest::write_file(splits_path, splits.dump());

  const fs::path stats_path = work / "stats.json";
  REQUIRE(run_clf("stats --labels " + labels.string() + " --splits " + splits_path.string() +
                      " --out " + stats_path.string(),
                  work)
              .exit_code == 0);
  const json stats = json::parse(ingest::read_file(stats_path));
  CHECK(stats["n_label_files"] == 6);
  CHECK(stats["split_counts"]["train"] == 4);
  CHECK(stats["split_counts"]["val"] == 1);
  CHECK(stats["split_counts"]["test"] == 1);
  CHECK(stats["split_total"] == 6);
  CHECK(stats["split_total"] == stats["n_frames"]);
  json hist = stats["r_occ_histogram"];
  REQUIRE(hist.size() == 10);
  std::size_t hist_total = 0;
  for (const auto& bin : hist) hist_total += bin.get<std::size_t>();
  CHECK(hist_total == stats["n_centerlines"]);
  fs::remove_all(work);
}

TEST_CASE("cli: config file values apply under flag overrides") {
  const fs::path work = fresh_dir("clf_cli_config");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 3 --frames 1 --occluder 1,0.0,0.3,invalid",
                  work)
              .exit_code == 0);
  json cfg;
  cfg["t_occ"] = 0.2;
  const fs::path cfg_path = work / "cfg.json";
  ingest::write_file(cfg_path, cfg.dump());

  const fs::path from_cfg = work / "labels_cfg";
  REQUIRE(run_clf("--config " + cfg_path.string() + " " + bundle_args(bundle, from_cfg), work)
              .exit_code == 0);
  const json m1 = json::parse(ingest::read_file(from_cfg / "manifest.json"));
  CHECK(m1["config"]["t_occ"] == 0.2);

  const fs::path overridden = work / "labels_flag";
  REQUIRE(run_clf("--config " + cfg_path.string() + " " + bundle_args(bundle, overridden) +
                      " --t-occ 0.9",
                  work)
              .exit_code == 0);
  const json m2 = json::parse(ingest::read_file(overridden / "manifest.json"));
  CHECK(m2["config"]["t_occ"] == 0.9);
  fs::remove_all(work);
}

TEST_CASE("cli: a manifest replays its run byte-identically") {
  const fs::path work = fresh_dir("clf_cli_manifest");
  const fs::path bundle = work / "bundle";
  REQUIRE(run_clf("synth --out " + bundle.string() +
                      " --lanes 3 --frames 2 --seed 8 --occluder 2,0.1,0.5,invalid",
                  work)
              .exit_code == 0);
  const fs::path labels = work / "labels";
  REQUIRE(run_clf(bundle_args(bundle, labels) + " --t-occ 0.7 --jobs 2", work).exit_code == 0);
  const json manifest = json::parse(ingest::read_file(labels / "manifest.json"));
  const std::string original_hash = manifest["output_hash"];
  const std::string original_bytes =
      ingest::read_file(labels / "frame_000001_forward.clabel.json");

  // Replay pointed at a fresh output directory.
  const fs::path replay = work / "replay";
  REQUIRE(run_clf("generate --config " + (labels / "manifest.json").string() + " --out " +
                      replay.string(),
                  work)
              .exit_code == 0);
  const json manifest2 = json::parse(ingest::read_file(replay / "manifest.json"));
  CHECK(manifest2["output_hash"] == original_hash);
  CHECK(ingest::read_file(replay / "frame_000001_forward.clabel.json") == original_bytes);
  fs::remove_all(work);
}
