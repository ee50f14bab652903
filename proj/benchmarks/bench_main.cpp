#include <benchmark/benchmark.h>

#include "ccdist/distance.hpp"
#include "ccdist/functionals.hpp"
#include "ccdist/scenarios.hpp"
#include "ccdist/topology.hpp"

using namespace ccdist;

static void BM_EndpointHeisenberg(benchmark::State& state) {
  const auto f = heisenberg_horizontal();
  std::vector<Vec> values;
  for (int j = 0; j < state.range(0); ++j) values.push_back(make_vec({std::cos(j * 0.3), std::sin(j * 0.3)}));
  const PiecewiseConstantControl u(values);
  for (auto _ : state) benchmark::DoNotOptimize(end_point(Vec::Zero(3), f, u));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 16);
}
BENCHMARK(BM_EndpointHeisenberg)->Arg(32)->Arg(256);

static void BM_FiberMetric(benchmark::State& state) {
  Mat a(2, 3);
  a << 1, 0.3, -0.5, 0.2, 1, 0.7;
  const auto f = constant_structure(a);
  const auto norm = state.range(0) == 0 ? VaryingNorm::euclidean(3) : VaryingNorm::weighted_lp(make_vec({1, 2, 0.5}), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fiber_metric(Vec::Zero(2), make_vec({0.4, -1}), f, norm));
}
BENCHMARK(BM_FiberMetric)->Arg(0)->Arg(1);

static void BM_DistanceOptVertical(benchmark::State& state) {
  const auto f = heisenberg_horizontal();
  const auto n = VaryingNorm::euclidean(2);
  DistanceOptions o;
  o.box = ChartBox::cube(3, 1.0);
  o.segments = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cc_distance_opt(Vec::Zero(3), make_vec({0, 0, 0.25}), f, n, o));
}
BENCHMARK(BM_DistanceOptVertical)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_GridGraphEuclidean(benchmark::State& state) {
  ScenarioSpec spec;
  spec.name = "euclidean";
  const Scenario s = build_scenario(spec);
  const auto& m = s.family.limit();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cc_distance_graph(make_vec({0, 0}), make_vec({1, 0.75}), m.f, m.norm, s.graph, s.graph_box));
  }
}
BENCHMARK(BM_GridGraphEuclidean)->Unit(benchmark::kMillisecond);

static void BM_WindingNumber(benchmark::State& state) {
  const PlanarMap square = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(x.x() * x.x() - x.y() * x.y(), 2 * x.x() * x.y());
  };
  for (auto _ : state) benchmark::DoNotOptimize(winding_number(square, {0, 0}, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_WindingNumber)->Arg(256)->Arg(4096);

BENCHMARK_MAIN();
