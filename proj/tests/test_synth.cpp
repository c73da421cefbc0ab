#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "clf/errors.hpp"
#include "clf/ingest/io.hpp"
#include "clf/labelgen/label_io.hpp"
#include "clf/labelgen/pipeline.hpp"
#include "clf/synth/scene.hpp"
#include "test_support.hpp"

using namespace clf;
using namespace clf::synth;

namespace {

const occlusion::Ontology& ont() {
  static const occlusion::Ontology o = occlusion::Ontology::builtin_default();
  return o;
}

struct PipelineRun {
  std::vector<labelgen::FrameLabels> frames;
};

/// Run the real pipeline (geom+ingest+labelgen+occlusion) over a bundle.
PipelineRun run_pipeline(const SceneBundle& bundle, double t_occ) {
  labelgen::LabelParams params = bundle.params;
  params.t_occ = t_occ;
  PipelineRun run;
  for (std::size_t i = 0; i < bundle.masks.size(); ++i) {
    const geom::Pose ego = bundle.trajectory.at(i);
    run.frames.push_back(labelgen::generate_frame(bundle.map, ego, bundle.cameras.front(),
                                                  bundle.masks[i], bundle.ontology, params,
                                                  bundle.grid));
  }
  return run;
}

void check_frame_against_expected(const labelgen::FrameLabels& got, const ExpectedFrame& expected,
                                  double t_occ, std::size_t min_keypoints) {
  // expected retention at this threshold
  std::vector<const ExpectedCenterline*> retained;
  for (const auto& line : expected.centerlines) {
    if (line.r_occ >= t_occ) continue;
    if (line.final_indices.size() < min_keypoints) continue;
    retained.push_back(&line);
  }
  REQUIRE(got.centerlines.size() == retained.size());
  for (std::size_t i = 0; i < retained.size(); ++i) {
    const auto& g = got.centerlines[i];
    const auto& e = *retained[i];
    CHECK(g.lane_id == e.lane_id);
    CHECK(g.n_total == e.keypoints.size());
    CHECK(g.n_occluded == e.n_occluded);
    CHECK(g.r_occ == e.r_occ);  // exact: same integer division
    REQUIRE(g.keypoints.size() == e.final_indices.size());
    for (std::size_t k = 0; k < g.keypoints.size(); ++k) {
      const ExpectedKeypoint& ek = e.keypoints[e.final_indices[k]];
      CHECK((g.keypoints[k].p_cam - ek.p_cam).norm() < 1e-6);
      CHECK((g.keypoints[k].pixel - ek.pixel).norm() < 1e-3);
      CHECK(g.keypoints[k].class_id == ek.class_id);
      CHECK(g.keypoints[k].category == ek.category);
    }
  }
}

}  // namespace

TEST_CASE("a clean straight scene produces r_occ = 0 labels") {
  SceneSpec spec;
  spec.n_lanes = 1;
  spec.occluders.clear();
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  REQUIRE(bundle.expected.size() == 1);
  REQUIRE(bundle.expected[0].centerlines.size() == 1);
  CHECK(bundle.expected[0].centerlines[0].r_occ == 0.0);
  CHECK(bundle.expected[0].centerlines[0].n_occluded == 0);
}

TEST_CASE("an occluder over fractions [0,0.3) yields r_occ of 0.3 up to quantization") {
  SceneSpec spec;
  spec.n_lanes = 3;
  spec.occluders = {{1, 0.0, 0.3, occlusion::Category::invalid}};
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  const auto& lines = bundle.expected[0].centerlines;
  REQUIRE(lines.size() == 3);
  const auto& occluded = lines[1];
  const double n = static_cast<double>(occluded.keypoints.size());
  CHECK(std::abs(occluded.r_occ - 0.3) <= 1.0 / n);
  CHECK(lines[0].r_occ == 0.0);
  CHECK(lines[2].r_occ == 0.0);
}

TEST_CASE("same spec and seed give a byte-identical bundle") {
  SceneSpec spec;
  spec.seed = 99;
  spec.occluders = {{0, 0.2, 0.5, occlusion::Category::occlusion_valid}};
  const SceneBundle a = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  const SceneBundle b = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  CHECK(ingest::serialize_map(a.map) == ingest::serialize_map(b.map));
  CHECK(ingest::serialize_trajectory(a.trajectory) == ingest::serialize_trajectory(b.trajectory));
  CHECK(ingest::serialize_calibration(a.cameras) == ingest::serialize_calibration(b.cameras));
  REQUIRE(a.masks.size() == b.masks.size());
  for (std::size_t i = 0; i < a.masks.size(); ++i) {
    CHECK(ingest::serialize_mask(a.masks[i]) == ingest::serialize_mask(b.masks[i]));
    CHECK(labelgen::serialize_labels(expected_to_labeled(a.expected[i], i, "forward")) ==
          labelgen::serialize_labels(expected_to_labeled(b.expected[i], i, "forward")));
  }

  SceneSpec other = spec;
  other.seed = 100;
  const SceneBundle c = generate(other, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  CHECK(ingest::serialize_map(a.map) != ingest::serialize_map(c.map));
}

TEST_CASE("written bundles parse back through the ingest formats") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "clf_test_bundle";
  fs::remove_all(dir);
  SceneSpec spec;
  spec.n_frames = 2;
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  write_bundle(bundle, dir);

  const auto map = ingest::parse_map(ingest::read_file(dir / "map.cmap.json"));
  CHECK(map.size() == spec.n_lanes);
  const auto traj = ingest::parse_trajectory(ingest::read_file(dir / "ego.traj.json"));
  CHECK(traj.size() == 2);
  const auto cams = ingest::parse_calibration(ingest::read_file(dir / "cameras.calib.json"));
  REQUIRE(cams.size() == 1);
  CHECK(cams[0].name() == "forward");
  const auto mask =
      ingest::parse_mask(ingest::read_file(dir / "masks" / "frame_000000_forward.smask"));
  CHECK(mask.width() == 1024);
  const auto labels = labelgen::parse_labels(
      ingest::read_file(dir / "expected" / "frame_000001_forward.clabel.json"));
  CHECK(labels.camera == "forward");
  CHECK(std::isinf(labels.labels.t_occ_used));
  const auto ontology =
      occlusion::Ontology::parse(ingest::read_file(dir / "ontology.ontology.json"));
  CHECK(ontology.categorize(0) == ont().categorize(0));
  fs::remove_all(dir);
}

TEST_CASE("pipeline output reproduces the analytic expectations on straight scenes") {
  SceneSpec spec;
  spec.n_lanes = 3;
  spec.n_frames = 3;
  spec.ego_speed = 4.0;
  spec.occluders = {{1, 0.1, 0.4, occlusion::Category::invalid},
                    {2, 0.5, 0.8, occlusion::Category::occlusion_valid}};
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});

  const double inf = std::numeric_limits<double>::infinity();
  const PipelineRun run = run_pipeline(bundle, inf);
  REQUIRE(run.frames.size() == 3);
  for (std::size_t f = 0; f < run.frames.size(); ++f) {
    check_frame_against_expected(run.frames[f], bundle.expected[f], inf,
                                 bundle.params.min_keypoints);
  }

  // Retention decisions across the whole threshold ladder.
  for (int step = 1; step <= 10; ++step) {
    const double t = 0.1 * step;
    const PipelineRun at_t = run_pipeline(bundle, t);
    for (std::size_t f = 0; f < at_t.frames.size(); ++f) {
      check_frame_against_expected(at_t.frames[f], bundle.expected[f], t,
                                   bundle.params.min_keypoints);
    }
  }
}

TEST_CASE("pipeline BEV targets match the oracle encoding") {
  SceneSpec spec;
  spec.n_lanes = 3;
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  const PipelineRun run = run_pipeline(bundle, std::numeric_limits<double>::infinity());
  const auto& got = run.frames[0].bev;
  const auto& want = bundle.expected[0].bev;
  REQUIRE(got.seg.rows() == want.seg.rows());
  REQUIRE(got.seg.cols() == want.seg.cols());
  for (int r = 0; r < got.seg.rows(); ++r) {
    for (int c = 0; c < got.seg.cols(); ++c) {
      CHECK(got.seg.at(r, c) == want.seg.at(r, c));
      CHECK(got.instance.at(r, c) == want.instance.at(r, c));
      if (got.seg.at(r, c)) {
        CHECK(std::abs(got.x_offset.at(r, c) - want.x_offset.at(r, c)) < 2e-6);
        CHECK(std::abs(got.height.at(r, c) - want.height.at(r, c)) < 1e-6);
      }
    }
  }
}

TEST_CASE("pipeline output reproduces the analytic expectations on an arc scene") {
  SceneSpec spec;
  spec.n_lanes = 2;
  spec.curvature = 0.015;
  spec.lane_length = 80.0;
  spec.occluders = {{0, 0.3, 0.6, occlusion::Category::invalid}};
  const SceneBundle bundle = generate(spec, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{});
  const double inf = std::numeric_limits<double>::infinity();
  const PipelineRun run = run_pipeline(bundle, inf);
  check_frame_against_expected(run.frames[0], bundle.expected[0], inf,
                               bundle.params.min_keypoints);
}

TEST_CASE("scene specs are validated") {
  SceneSpec bad;
  bad.occluders = {{5, 0.0, 0.5, occlusion::Category::invalid}};  // lane out of range
  CHECK_THROWS_AS(generate(bad, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{}), Error);

  SceneSpec swapped;
  swapped.occluders = {{0, 0.6, 0.2, occlusion::Category::invalid}};
  CHECK_THROWS_AS(generate(swapped, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{}),
                  Error);

  SceneSpec curvy;
  curvy.curvature = 0.2;
  CHECK_THROWS_AS(generate(curvy, ont(), labelgen::LabelParams{}, labelgen::BevGridSpec{}), Error);
}
