#include <doctest.h>

#include <cmath>
#include <random>

#include "clf/eval/io.hpp"
#include "clf/eval/metrics.hpp"
#include "test_support.hpp"

using namespace clf;
using namespace clf::eval;

namespace {

/// Straight constant-x lane spanning y in [y0, y1] at height z.
Polyline3 straight(double x, double z = 0.0, double y0 = 0.0, double y1 = 100.0) {
  return {{x, y0, z}, {x, y1, z}};
}

}  // namespace

TEST_CASE("evaluating ground truth against itself is perfect") {
  const std::vector<Polyline3> gt{straight(-3.0, 0.2), straight(0.5, -0.1), straight(4.0)};
  const MatchSpec spec;
  const auto assignment = match(gt, gt, spec);
  CHECK(assignment.matches.size() == 3);
  CHECK(assignment.unmatched_pred.empty());
  CHECK(assignment.unmatched_gt.empty());
  const auto report = score(assignment, spec);
  CHECK(report.precision == 1.0);
  CHECK(report.recall == 1.0);
  CHECK(report.f1 == 1.0);
  REQUIRE(report.x_err_near.has_value());
  REQUIRE(report.x_err_far.has_value());
  CHECK(*report.x_err_near == 0.0);
  CHECK(*report.x_err_far == 0.0);
  CHECK(*report.z_err_near == 0.0);
  CHECK(*report.z_err_far == 0.0);
  CHECK_FALSE(report.degenerate);
}

TEST_CASE("a prediction two thresholds away is a false positive plus a false negative") {
  const MatchSpec spec;  // threshold 1.5
  const std::vector<Polyline3> pred{straight(3.0)};
  const std::vector<Polyline3> gt{straight(0.0)};
  const auto assignment = match(pred, gt, spec);
  CHECK(assignment.matches.empty());
  CHECK(assignment.unmatched_pred.size() == 1);
  CHECK(assignment.unmatched_gt.size() == 1);
  const auto report = score(assignment, spec);
  CHECK(report.tp == 0);
  CHECK(report.fp == 1);
  CHECK(report.fn == 1);
  CHECK(report.f1 == 0.0);
}

TEST_CASE("a crossed 3x3 configuration matches the exhaustive assignment") {
  const MatchSpec spec;
  // pairwise costs are analytic for constant-x lanes: |x_pred - x_gt|
  const std::vector<double> px{0.0, 1.0, 2.0};
  const std::vector<double> gx{0.4, 1.4, 2.4};
  std::vector<Polyline3> pred, gt;
  for (const double x : px) pred.push_back(straight(x));
  for (const double x : gx) gt.push_back(straight(x));

  std::vector<std::vector<double>> cost(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double c = std::abs(px[i] - gx[j]);
      cost[i][j] = c <= spec.match_threshold ? c : 1e9;
    }
  }
  const auto oracle = test::brute_force_assignment(cost, 1e9);
  const auto assignment = match(pred, gt, spec);
  CHECK(assignment.matches.size() == oracle.n_matches);
  double total = 0.0;
  for (const auto& m : assignment.matches) total += m.mean_abs_dx;
  CHECK(total == doctest::Approx(oracle.total_cost).epsilon(1e-9));
}

TEST_CASE("matcher equals brute force on random instances up to 5x5") {
  auto rng = test::seeded_rng(61);
  std::uniform_real_distribution<double> x(-8.0, 8.0);
  const MatchSpec spec;
  for (int iter = 0; iter < 200; ++iter) {
    const int np = static_cast<int>(rng() % 6);
    const int ng = static_cast<int>(rng() % 6);
    std::vector<double> px, gx;
    std::vector<Polyline3> pred, gt;
    for (int i = 0; i < np; ++i) {
      px.push_back(x(rng));
      pred.push_back(straight(px.back()));
    }
    for (int j = 0; j < ng; ++j) {
      gx.push_back(x(rng));
      gt.push_back(straight(gx.back()));
    }
    std::vector<std::vector<double>> cost(np, std::vector<double>(ng));
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < ng; ++j) {
        const double c = std::abs(px[i] - gx[j]);
        cost[i][j] = c <= spec.match_threshold ? c : 1e9;
      }
    }
    const auto oracle = test::brute_force_assignment(cost, 1e9);
    const auto assignment = match(pred, gt, spec);
    CHECK(assignment.matches.size() == oracle.n_matches);
    double total = 0.0;
    for (const auto& m : assignment.matches) total += m.mean_abs_dx;
    CHECK(total == doctest::Approx(oracle.total_cost).epsilon(1e-9));
    CHECK(assignment.matches.size() + assignment.unmatched_pred.size() ==
          static_cast<std::size_t>(np));
    CHECK(assignment.matches.size() + assignment.unmatched_gt.size() ==
          static_cast<std::size_t>(ng));
  }
}

TEST_CASE("a constant 0.3 m lateral shift keeps F1 at 1 with 0.3 m X errors") {
  const MatchSpec spec;
  std::vector<Polyline3> pred, gt;
  for (const double x : {-4.0, 0.0, 4.0}) {
    gt.push_back(straight(x, 0.5));
    pred.push_back(straight(x + 0.3, 0.5));
  }
  const auto report = score(match(pred, gt, spec), spec);
  CHECK(report.f1 == 1.0);
  REQUIRE(report.x_err_near.has_value());
  REQUIRE(report.x_err_far.has_value());
  CHECK(std::abs(*report.x_err_near - 0.3) < 1e-9);
  CHECK(std::abs(*report.x_err_far - 0.3) < 1e-9);
  CHECK(std::abs(*report.z_err_near) < 1e-12);
  CHECK(std::abs(*report.z_err_far) < 1e-12);
}

TEST_CASE("empty predictions give zero precision by convention") {
  const MatchSpec spec;
  const auto report = score(match({}, {straight(0.0)}, spec), spec);
  CHECK(report.precision == 0.0);
  CHECK(report.recall == 0.0);
  CHECK(report.f1 == 0.0);
  CHECK(report.degenerate);
  CHECK_FALSE(report.x_err_near.has_value());
}

TEST_CASE("swapping pred and gt swaps precision and recall, keeps F1 and errors") {
  auto rng = test::seeded_rng(62);
  std::uniform_real_distribution<double> x(-8.0, 8.0);
  std::uniform_real_distribution<double> z(-1.0, 1.0);
  const MatchSpec spec;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<Polyline3> a, b;
    const int na = 1 + static_cast<int>(rng() % 4);
    const int nb = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < na; ++i) a.push_back(straight(x(rng), z(rng)));
    for (int i = 0; i < nb; ++i) b.push_back(straight(x(rng), z(rng)));
    const auto fwd = score(match(a, b, spec), spec);
    const auto rev = score(match(b, a, spec), spec);
    CHECK(fwd.precision == doctest::Approx(rev.recall).epsilon(1e-12));
    CHECK(fwd.recall == doctest::Approx(rev.precision).epsilon(1e-12));
    CHECK(fwd.f1 == doctest::Approx(rev.f1).epsilon(1e-12));
    CHECK(fwd.x_err_near.has_value() == rev.x_err_near.has_value());
    if (fwd.x_err_near) {
      CHECK(*fwd.x_err_near == doctest::Approx(*rev.x_err_near).epsilon(1e-12));
    }
  }
}

TEST_CASE("spurious predictions never increase precision; missed gt never increases recall") {
  const MatchSpec spec;
  std::vector<Polyline3> pred{straight(0.0), straight(4.0)};
  std::vector<Polyline3> gt{straight(0.1), straight(4.1)};
  const auto base = score(match(pred, gt, spec), spec);

  auto pred_plus = pred;
  pred_plus.push_back(straight(12.0));  // nowhere near any gt
  const auto with_fp = score(match(pred_plus, gt, spec), spec);
  CHECK(with_fp.precision <= base.precision);
  CHECK(with_fp.recall == base.recall);

  auto gt_plus = gt;
  gt_plus.push_back(straight(-12.0));
  const auto with_fn = score(match(pred, gt_plus, spec), spec);
  CHECK(with_fn.recall <= base.recall);
  CHECK(with_fn.precision == base.precision);
}

TEST_CASE("f1 is exactly the harmonic mean of precision and recall") {
  auto rng = test::seeded_rng(63);
  std::uniform_real_distribution<double> x(-8.0, 8.0);
  const MatchSpec spec;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<Polyline3> pred, gt;
    const int np = static_cast<int>(rng() % 5);
    const int ng = static_cast<int>(rng() % 5);
    for (int i = 0; i < np; ++i) pred.push_back(straight(x(rng)));
    for (int i = 0; i < ng; ++i) gt.push_back(straight(x(rng)));
    const auto r = score(match(pred, gt, spec), spec);
    if (r.precision + r.recall > 0.0) {
      CHECK(r.f1 == 2.0 * r.precision * r.recall / (r.precision + r.recall));
    } else {
      CHECK(r.f1 == 0.0);
    }
  }
}

TEST_CASE("near/far bands split the errors at the band boundary") {
  MatchSpec spec;  // near [0,40), far [40,100)
  // gt straight; pred shifted +0.2 only beyond y=40 (kink at the boundary)
  const Polyline3 gt_lane = straight(0.0);
  const Polyline3 pred_lane{{0.0, 0.0, 0.0}, {0.0, 40.0, 0.0}, {0.4, 40.0001, 0.0}, {0.4, 100.0, 0.0}};
  const auto report = score(match({pred_lane}, {gt_lane}, spec), spec);
  REQUIRE(report.x_err_near.has_value());
  REQUIRE(report.x_err_far.has_value());
  CHECK(*report.x_err_near < 0.01);
  CHECK(*report.x_err_far == doctest::Approx(0.4).epsilon(1e-3));
}

TEST_CASE("the report and lanes files serialize and parse") {
  const MatchSpec spec;
  const std::vector<Polyline3> gt{straight(0.0), straight(3.0)};
  MetricsAccumulator acc;
  acc.add(match(gt, gt, spec), spec);
  const auto corpus = acc.report();
  const std::string report_bytes =
      serialize_report(spec, {{"000000", score(match(gt, gt, spec), spec)}}, corpus);
  CHECK(report_bytes.find("\"f1\":1.0") != std::string::npos);
  CHECK(report_bytes.find("matched_points") != std::string::npos);

  FrameLanes lanes{"000042", gt};
  const std::string bytes = serialize_lanes(lanes);
  const FrameLanes back = parse_lanes(bytes);
  CHECK(back.frame_id == "000042");
  REQUIRE(back.lanes.size() == 2);
  CHECK(back.lanes[0][0] == gt[0][0]);
  CHECK(serialize_lanes(back) == bytes);
}

TEST_CASE("accumulator merge equals batch accumulation") {
  const MatchSpec spec;
  const std::vector<Polyline3> a{straight(0.0)}, b{straight(0.2)};
  MetricsAccumulator merged, part1, part2;
  merged.add(match(a, b, spec), spec);
  merged.add(match(b, a, spec), spec);
  part1.add(match(a, b, spec), spec);
  part2.add(match(b, a, spec), spec);
  part1.merge(part2);
  const auto r1 = merged.report();
  const auto r2 = part1.report();
  CHECK(r1.tp == r2.tp);
  CHECK(r1.f1 == r2.f1);
  CHECK(*r1.x_err_near == doctest::Approx(*r2.x_err_near).epsilon(1e-14));
}
