#include "cagkit/aggregation.hpp"

#include <doctest.h>

using namespace cagkit;

namespace {

CausalStatement st(const std::string& id, Polarity p, double belief, std::size_t evidence = 1,
                   const std::string& s = "wm/a", const std::string& o = "wm/b") {
  CausalStatement x;
  x.id = id;
  x.subject = s;
  x.object = o;
  x.polarity = p;
  x.belief = belief;
  for (std::size_t i = 0; i < evidence; ++i) x.evidence.push_back({"d" + std::to_string(i), "t", {}, {}, {}});
  return x;
}

}  // namespace

TEST_CASE("belief policies") {
  const std::vector<CausalStatement> sts{st("b", Polarity::Same, 0.2, 2), st("a", Polarity::Same, 0.8, 3)};
  const auto mx = aggregate_edge("wm/a", "wm/b", sts);
  CHECK(mx.aggregate_belief == doctest::Approx(0.8));
  CHECK(mx.evidence_count == 5);
  CHECK(mx.statement_ids == std::vector<std::string>{"a", "b"});
  const auto mean = aggregate_edge("wm/a", "wm/b", sts, std::nullopt, BeliefPolicy::Mean);
  CHECK(mean.aggregate_belief == doctest::Approx(0.5));
  CHECK(aggregate_edge("wm/a", "wm/b", {}).aggregate_belief == 0.0);
}

TEST_CASE("an override decides the polarity without touching the counts") {
  const std::vector<CausalStatement> sts{st("a", Polarity::Same, 0.5), st("b", Polarity::Opposite, 0.5)};
  const auto e = aggregate_edge("wm/a", "wm/b", sts, Polarity::Opposite);
  CHECK(e.aggregate_polarity == AggregatePolarity::Opposite);
  CHECK(e.counts == PolarityCounts{1, 1, 0});
  CHECK(aggregate_edge("wm/a", "wm/b", {}, Polarity::Same).aggregate_polarity == AggregatePolarity::Same);
  CHECK_THROWS_AS(aggregate_edge("wm/a", "wm/b", sts, Polarity::Unknown), Error);
}

TEST_CASE("aggregation rejects foreign and discarded statements") {
  try {
    aggregate_edge("wm/a", "wm/b", std::vector<CausalStatement>{st("x", Polarity::Same, 0.5, 1, "wm/a", "wm/c")});
    FAIL("expected MismatchedStatement");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedStatement);
  }
  auto d = st("d", Polarity::Same, 0.5);
  d.discarded = true;
  CHECK_THROWS_AS(aggregate_edge("wm/a", "wm/b", std::vector<CausalStatement>{d}), Error);
}

TEST_CASE("aggregate_graph skips discarded statements and sorts pairs") {
  auto d = st("d", Polarity::Opposite, 0.9, 1, "wm/a", "wm/c");
  d.discarded = true;
  const std::vector<CausalStatement> sts{st("1", Polarity::Same, 0.3, 1, "wm/b", "wm/a"), st("2", Polarity::Unknown, 0.4),
                                         d};
  const auto edges = aggregate_graph(sts);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].subject == "wm/a");
  CHECK(edges[0].aggregate_polarity == AggregatePolarity::Ambiguous);
  CHECK(edges[1].subject == "wm/b");
  CHECK(edges[1].aggregate_polarity == AggregatePolarity::Same);
  const auto j = to_json(edges[1]);
  CHECK(j["polarity"] == "same");
  CHECK(j["override"].is_null());
}
