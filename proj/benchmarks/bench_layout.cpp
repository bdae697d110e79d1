#include "generators.hpp"

#include "cagkit/layout.hpp"
#include "cagkit/routing.hpp"

#include <benchmark/benchmark.h>

using namespace cagkit;

static void BM_FlowLayout(benchmark::State& state) {
  const auto g = bench::make_dag(static_cast<std::size_t>(state.range(0)), 1.4, 11);
  for (auto _ : state) benchmark::DoNotOptimize(flow_layout(g));
}
BENCHMARK(BM_FlowLayout)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_FlowLayoutNoRoutes(benchmark::State& state) {
  const auto g = bench::make_dag(200, 1.4, 11);
  LayoutOptions opts;
  opts.route_edges = false;
  for (auto _ : state) benchmark::DoNotOptimize(flow_layout(g, opts));
}
BENCHMARK(BM_FlowLayoutNoRoutes)->Unit(benchmark::kMillisecond);

static void BM_RouteEdge(benchmark::State& state) {
  std::vector<Box> obstacles;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) obstacles.push_back({120.0 + c * 110, 20.0 + r * 120, 60, 70});
  const Box source{0, 200, 60, 40}, target{620, 220, 60, 40};
  for (auto _ : state) benchmark::DoNotOptimize(route_edge(source, target, obstacles));
}
BENCHMARK(BM_RouteEdge)->Unit(benchmark::kMicrosecond);
