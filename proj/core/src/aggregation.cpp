#include "cagkit/aggregation.hpp"

#include <algorithm>
#include <map>

namespace cagkit {

std::string_view to_string(BeliefPolicy p) { return p == BeliefPolicy::Max ? "max" : "mean"; }

std::optional<BeliefPolicy> parse_belief_policy(std::string_view text) {
  if (text == "max") return BeliefPolicy::Max;
  if (text == "mean") return BeliefPolicy::Mean;
  return std::nullopt;
}

AggregatePolarity classify_polarity(const PolarityCounts& c) {
  if (c.total() == 0) return AggregatePolarity::NoEvidence;
  if (c.same >= 1 && c.opposite >= 1) return AggregatePolarity::Ambiguous;
  if (c.same >= 1) return AggregatePolarity::Same;
  if (c.opposite >= 1) return AggregatePolarity::Opposite;
  return AggregatePolarity::Ambiguous;  // unknown only
}

AggregatedEdge aggregate_edge(std::string_view subject, std::string_view object,
                              std::span<const CausalStatement> statements, std::optional<Polarity> override,
                              BeliefPolicy policy) {
  if (override && *override == Polarity::Unknown)
    throw Error(ErrorCode::InvalidArgument, "edge override must be same or opposite");

  AggregatedEdge edge;
  edge.subject = subject;
  edge.object = object;
  edge.user_polarity_override = override;
  edge.statement_ids.reserve(statements.size());

  double belief_sum = 0.0;
  double belief_max = 0.0;
  for (const auto& s : statements) {
    if (s.subject != subject || s.object != object)
      throw Error(ErrorCode::MismatchedStatement,
                  "statement " + s.id + " does not belong to edge " + std::string(subject) + " -> " +
                      std::string(object),
                  {{"statement_id", s.id}});
    if (s.discarded)
      throw Error(ErrorCode::InvalidArgument, "discarded statement " + s.id + " passed to aggregation");
    switch (s.polarity) {
      case Polarity::Same: ++edge.counts.same; break;
      case Polarity::Opposite: ++edge.counts.opposite; break;
      case Polarity::Unknown: ++edge.counts.unknown; break;
    }
    belief_sum += s.belief;
    belief_max = std::max(belief_max, s.belief);
    edge.evidence_count += s.evidence.size();
    edge.statement_ids.push_back(s.id);
  }
  std::sort(edge.statement_ids.begin(), edge.statement_ids.end());

  if (!statements.empty())
    edge.aggregate_belief =
        policy == BeliefPolicy::Max ? belief_max : belief_sum / static_cast<double>(statements.size());

  if (override)
    edge.aggregate_polarity = *override == Polarity::Same ? AggregatePolarity::Same : AggregatePolarity::Opposite;
  else
    edge.aggregate_polarity = classify_polarity(edge.counts);
  return edge;
}

std::vector<AggregatedEdge> aggregate_graph(std::span<const CausalStatement> statements, BeliefPolicy policy) {
  std::map<std::pair<std::string_view, std::string_view>, std::vector<CausalStatement>> groups;
  for (const auto& s : statements) {
    if (s.discarded) continue;
    groups[{s.subject, s.object}].push_back(s);
  }
  std::vector<AggregatedEdge> edges;
  edges.reserve(groups.size());
  for (const auto& [pair, members] : groups)
    edges.push_back(aggregate_edge(pair.first, pair.second, members, std::nullopt, policy));
  return edges;
}

nlohmann::json to_json(const AggregatedEdge& e) {
  nlohmann::json j = {
      {"subject", e.subject},
      {"object", e.object},
      {"statement_ids", e.statement_ids},
      {"counts", {{"same", e.counts.same}, {"opposite", e.counts.opposite}, {"unknown", e.counts.unknown}}},
      {"polarity", to_string(e.aggregate_polarity)},
      {"belief", e.aggregate_belief},
      {"evidence_count", e.evidence_count},
  };
  j["override"] = e.user_polarity_override ? nlohmann::json(to_string(*e.user_polarity_override)) : nlohmann::json(nullptr);
  return j;
}

}  // namespace cagkit
