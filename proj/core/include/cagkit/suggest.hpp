#pragma once

#include "cagkit/aggregation.hpp"
#include "cagkit/embeddings.hpp"
#include "cagkit/store.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cagkit {

struct ConceptSuggestion {
  std::string concept_id;
  std::string display_name;
  std::size_t statements = 0;
};

/// Case-insensitive substring match on display name and leaf segment, ranked
/// by statement count descending then id. Throws EmptyQuery on blank input.
std::vector<ConceptSuggestion> suggest_concepts(const Corpus& corpus, std::string_view query, std::size_t k = 10);

enum class Direction { Incoming, Outgoing };

struct RelationshipSuggestion {
  std::string subject;
  std::string object;
  std::size_t support = 0;
  AggregatePolarity aggregate_polarity = AggregatePolarity::NoEvidence;
  Direction direction = Direction::Outgoing;
};

struct RelationshipSuggestions {
  std::vector<RelationshipSuggestion> incoming;
  std::vector<RelationshipSuggestion> outgoing;
};

using ConceptPair = std::pair<std::string, std::string>;

/// Top-k in and out relationships of `node` by supporting statement count;
/// ties by counterpart id. Pairs in `exclude` are skipped.
RelationshipSuggestions suggest_relationships(const Corpus& corpus, std::string_view node, std::size_t k = 5,
                                              const std::set<ConceptPair>& exclude = {},
                                              BeliefPolicy policy = BeliefPolicy::Max);

struct IndirectPath {
  std::vector<std::string> concepts;     // source ... target
  std::vector<std::size_t> hop_support;  // one per hop
  double affinity = 0.0;                 // mean cosine of consecutive concepts

  std::size_t hops() const { return hop_support.size(); }
  std::size_t min_support() const;
  bool operator==(const IndirectPath&) const = default;
};

inline constexpr std::size_t kMaxPathHops = 4;

/// Every simple directed path source -> target with at most `max_hops` hops
/// over the aggregated graph, unranked, affinity filled in.
std::vector<IndirectPath> enumerate_paths(const Corpus& corpus, std::string_view source, std::string_view target,
                                          std::size_t max_hops, const EmbeddingTable* embeddings = nullptr);

/// Total order: fewer hops, higher minimum hop support, higher affinity, then
/// lexicographic concept sequence.
bool path_rank_less(const IndirectPath& a, const IndirectPath& b);

/// Ranked top-k paths. Requires 2 <= max_hops <= 4 and source != target
/// (InvalidArgument); NoPathFound when nothing connects the pair.
std::vector<IndirectPath> indirect_paths(const Corpus& corpus, std::string_view source, std::string_view target,
                                         std::size_t max_hops = 2, std::size_t k = 5,
                                         const EmbeddingTable* embeddings = nullptr);

nlohmann::json to_json(const ConceptSuggestion& s);
nlohmann::json to_json(const RelationshipSuggestions& s);
nlohmann::json to_json(const IndirectPath& p, const EmbeddingTable* embeddings = nullptr);

}  // namespace cagkit
