#pragma once

#include "cagkit/types.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cagkit {

enum class BeliefPolicy { Max, Mean };

std::string_view to_string(BeliefPolicy p);
std::optional<BeliefPolicy> parse_belief_policy(std::string_view text);

struct PolarityCounts {
  std::size_t same = 0;
  std::size_t opposite = 0;
  std::size_t unknown = 0;

  std::size_t total() const { return same + opposite + unknown; }
  bool operator==(const PolarityCounts&) const = default;
};

/// Concept-pair roll-up of active statements.
struct AggregatedEdge {
  std::string subject;
  std::string object;
  std::vector<std::string> statement_ids;  // ascending
  PolarityCounts counts;
  AggregatePolarity aggregate_polarity = AggregatePolarity::NoEvidence;
  double aggregate_belief = 0.0;
  std::size_t evidence_count = 0;
  std::optional<Polarity> user_polarity_override;

  bool operator==(const AggregatedEdge&) const = default;
};

/// Polarity implied by counts alone:
///   empty -> NoEvidence; same only -> Same; opposite only -> Opposite;
///   both, or unknown only -> Ambiguous.
AggregatePolarity classify_polarity(const PolarityCounts& counts);

/// Rolls `statements` up into one edge. Throws MismatchedStatement when a
/// statement's pair differs, InvalidArgument for discarded statements or an
/// Unknown override.
AggregatedEdge aggregate_edge(std::string_view subject, std::string_view object,
                              std::span<const CausalStatement> statements,
                              std::optional<Polarity> override = std::nullopt,
                              BeliefPolicy policy = BeliefPolicy::Max);

/// One edge per distinct (subject, object) among active statements, sorted by pair.
std::vector<AggregatedEdge> aggregate_graph(std::span<const CausalStatement> statements,
                                            BeliefPolicy policy = BeliefPolicy::Max);

nlohmann::json to_json(const AggregatedEdge& e);

}  // namespace cagkit
