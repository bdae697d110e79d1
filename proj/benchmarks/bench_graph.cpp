#include "generators.hpp"

#include "cagkit/aggregation.hpp"
#include "cagkit/store.hpp"
#include "cagkit/suggest.hpp"

#include <benchmark/benchmark.h>

using namespace cagkit;

static void BM_AggregateGraph(benchmark::State& state) {
  const auto statements = bench::make_statements(static_cast<std::size_t>(state.range(0)), 50, 1);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_graph(statements));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AggregateGraph)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CorpusBuild(benchmark::State& state) {
  const auto statements = bench::make_statements(static_cast<std::size_t>(state.range(0)), 200, 2);
  for (auto _ : state) {
    Corpus c(statements, {}, Ontology{});
    benchmark::DoNotOptimize(c.size());
  }
}
BENCHMARK(BM_CorpusBuild)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_IndirectPaths(benchmark::State& state) {
  const Corpus corpus(bench::make_statements(4000, 150, 3), {}, Ontology{});
  const auto hops = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(indirect_paths(corpus, "wm/concept/g0/c0", "wm/concept/g1/c1", hops, 5));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(BM_IndirectPaths)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
