#include "generators.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cagkit::bench {

std::vector<CausalStatement> make_statements(std::size_t count, std::size_t concepts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const char* regions[] = {"Africa/Eastern Africa/Ethiopia", "Africa/Eastern Africa/Kenya",
                                  "Africa/Western Africa/Mali", "Asia/Southern Asia/Nepal"};
  static const char* sources[] = {"FEWS NET", "WFP", "FAO", "ReliefWeb"};
  auto concept_id = [](std::size_t i) {
    return "wm/concept/g" + std::to_string(i % 6) + "/c" + std::to_string(i);
  };
  std::uniform_int_distribution<std::size_t> pick(0, concepts - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> year(2000, 2020);
  std::uniform_int_distribution<int> nev(1, 4);
  std::vector<CausalStatement> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CausalStatement s;
    s.id = "s" + std::to_string(i);
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    if (b == a) b = (a + 1) % concepts;
    s.subject = concept_id(a);
    s.object = concept_id(b);
    const double p = unit(rng);
    s.polarity = p < 0.5 ? Polarity::Same : p < 0.85 ? Polarity::Opposite : Polarity::Unknown;
    s.belief = unit(rng);
    for (int k = nev(rng); k > 0; --k) {
      Evidence e;
      e.text = "evidence";
      e.doc_id = "d" + std::to_string(rng() % 2000);
      e.source = sources[rng() % 4];
      e.publication_date = Date{year(rng), 6, 1};
      s.evidence.push_back(std::move(e));
    }
    GeoTemporalContext ctx;
    ctx.region_path = regions[rng() % 4];
    ctx.start = Date{year(rng), 1, 1};
    s.context = ctx;
    out.push_back(std::move(s));
  }
  return out;
}

LayoutGraph make_dag(std::size_t nodes, double avg_out_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LayoutGraph g;
  std::uniform_int_distribution<int> w(6, 18), h(3, 5);
  for (std::size_t i = 0; i < nodes; ++i) g.nodes.push_back({"n" + std::to_string(i), w(rng) * 10.0, h(rng) * 10.0});
  std::vector<std::size_t> rank(nodes);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  const auto edges = static_cast<std::size_t>(avg_out_degree * static_cast<double>(nodes));
  std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
  for (std::size_t e = 0; e < edges; ++e) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (rank[a] > rank[b]) std::swap(a, b);
    g.edges.push_back({g.nodes[a].id, g.nodes[b].id});
  }
  return g;
}

}  // namespace cagkit::bench
