#include "generators.hpp"

#include "cagkit/search.hpp"
#include "cagkit/store.hpp"

#include <benchmark/benchmark.h>

using namespace cagkit;

namespace {

const Corpus& corpus() {
  static const Corpus c(bench::make_statements(10000, 200, 7), {}, Ontology{});
  return c;
}

}  // namespace

static void BM_QueryRegionAndConcept(benchmark::State& state) {
  FacetQuery q;
  q.factor.concepts = std::set<std::string>{"wm/concept/g2"};
  q.factor.region_prefix = "Africa/Eastern Africa";
  const Corpus& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(run_query(c, q));
}
BENCHMARK(BM_QueryRegionAndConcept)->Unit(benchmark::kMillisecond);

static void BM_QueryYearsAndPolarity(benchmark::State& state) {
  FacetQuery q;
  q.doc.year_range = std::pair{2005, 2010};
  q.rel.polarities = std::set<Polarity>{Polarity::Opposite};
  q.rel.min_evidence = 2;
  const Corpus& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(run_query(c, q));
}
BENCHMARK(BM_QueryYearsAndPolarity)->Unit(benchmark::kMillisecond);

static void BM_QueryEverything(benchmark::State& state) {
  const Corpus& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(run_query(c, FacetQuery{}));
}
BENCHMARK(BM_QueryEverything)->Unit(benchmark::kMillisecond);

static void BM_NestedProjection(benchmark::State& state) {
  const auto result = run_query(corpus(), FacetQuery{});
  for (auto _ : state) benchmark::DoNotOptimize(nested_graph_projection(corpus(), result));
}
BENCHMARK(BM_NestedProjection)->Unit(benchmark::kMillisecond);
