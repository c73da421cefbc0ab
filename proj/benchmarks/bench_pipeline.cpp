#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "clf/heads/decode.hpp"
#include "clf/heads/losses.hpp"
#include "clf/labelgen/bev.hpp"
#include "clf/labelgen/pipeline.hpp"
#include "clf/labelgen/spline.hpp"
#include "clf/synth/scene.hpp"

namespace {

using namespace clf;

std::vector<Eigen::Vector3d> arc_polyline(std::size_t n_vertices) {
  std::vector<Eigen::Vector3d> poly;
  poly.reserve(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    const double s = 0.5 * static_cast<double>(i);
    poly.emplace_back(0.02 * s * s, s, 0.01 * s);
  }
  return poly;
}

void BM_ResamplePolyline(benchmark::State& state) {
  const auto poly = arc_polyline(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(labelgen::resample_polyline(poly, 0.5));
  }
}
BENCHMARK(BM_ResamplePolyline)->Arg(50)->Arg(200)->Arg(800);

std::vector<std::vector<Eigen::Vector3d>> bench_lanes(int n_lanes) {
  std::vector<std::vector<Eigen::Vector3d>> lanes;
  for (int i = 0; i < n_lanes; ++i) {
    std::vector<Eigen::Vector3d> lane;
    const double x0 = -12.0 + 24.0 * i / std::max(1, n_lanes - 1);
    for (double y = 0.0; y <= 100.0; y += 0.5) {
      lane.emplace_back(x0 + 0.01 * y, y, 0.002 * y);
    }
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

void BM_EncodeBev(benchmark::State& state) {
  const auto lanes = bench_lanes(static_cast<int>(state.range(0)));
  const labelgen::BevGridSpec grid;
  for (auto _ : state) {
    benchmark::DoNotOptimize(labelgen::encode_bev(lanes, grid));
  }
}
BENCHMARK(BM_EncodeBev)->Arg(2)->Arg(6);

void BM_DecodeBev(benchmark::State& state) {
  const auto lanes = bench_lanes(static_cast<int>(state.range(0)));
  const labelgen::BevGridSpec grid;
  const auto targets = labelgen::encode_bev(lanes, grid);
  heads::HeadOutput out;
  out.s1 = static_cast<std::uint32_t>(targets.seg.cols());
  out.s2 = static_cast<std::uint32_t>(targets.seg.rows());
  out.embed_dim = 4;
  const std::size_t n = out.plane_size();
  out.conf.assign(n, 0.0f);
  out.embed.assign(n * 4, 0.0f);
  out.x_offset_logits.assign(n, 0.0f);
  out.height.assign(n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    if (targets.seg.data()[i] == 0) continue;
    out.conf[i] = 1.0f;
    const double dx = targets.x_offset.data()[i];
    out.x_offset_logits[i] = static_cast<float>(std::log(dx / (1.0 - dx)));
    out.embed[i] = 10.0f * static_cast<float>(targets.instance.data()[i]);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(heads::decode_bev(out, grid, heads::DecodeParams{}));
  }
}
BENCHMARK(BM_DecodeBev)->Arg(2)->Arg(6);

heads::EmbeddingField bench_field(int n_instances, int per_instance, int dim) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> nd;
  heads::EmbeddingField f;
  f.dim = dim;
  for (int c = 0; c < n_instances; ++c) {
    for (int i = 0; i < per_instance; ++i) {
      for (int d = 0; d < dim; ++d) f.embeddings.push_back(4.0 * c + nd(rng));
      f.instance.push_back(static_cast<std::uint32_t>(c + 1));
    }
  }
  return f;
}

void BM_PullLoss(benchmark::State& state) {
  const auto field = bench_field(static_cast<int>(state.range(0)), 400, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(heads::pull_loss(field, 0.5));
  }
}
BENCHMARK(BM_PullLoss)->Arg(4)->Arg(12);

void BM_PushLoss(benchmark::State& state) {
  const auto field = bench_field(static_cast<int>(state.range(0)), 400, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(heads::push_loss(field, 3.0));
  }
}
BENCHMARK(BM_PushLoss)->Arg(4)->Arg(12);

void BM_GenerateFrame(benchmark::State& state) {
  synth::SceneSpec spec;
  spec.n_lanes = static_cast<std::size_t>(state.range(0));
  spec.lane_spacing = 24.0 / std::max<double>(1.0, static_cast<double>(spec.n_lanes) - 1.0);
  const auto ontology = occlusion::Ontology::builtin_default();
  const labelgen::LabelParams params;
  const labelgen::BevGridSpec grid;
  const auto bundle = synth::generate(spec, ontology, params, grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(labelgen::generate_frame(bundle.map, bundle.trajectory.at(0),
                                                      bundle.cameras.front(), bundle.masks[0],
                                                      ontology, params, grid));
  }
}
BENCHMARK(BM_GenerateFrame)->Arg(3)->Arg(6);

}  // namespace
