#pragma once

#include "cagkit/aggregation.hpp"
#include "cagkit/store.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cagkit {

struct BoundingBox {
  double min_lat = -90, min_lon = -180, max_lat = 90, max_lon = 180;
  bool operator==(const BoundingBox&) const = default;
};

/// Document-level facets. Each present filter is satisfied when ANY of the
/// statement's evidence items satisfies it.
struct DocFilters {
  std::optional<std::set<std::string>> doc_ids;
  std::optional<std::set<std::string>> sources;
  std::optional<std::pair<int, int>> year_range;  // inclusive publication years
  bool operator==(const DocFilters&) const = default;
};

struct RelFilters {
  std::optional<std::set<Polarity>> polarities;
  std::optional<std::size_t> min_evidence;
  std::optional<double> min_belief;
  bool operator==(const RelFilters&) const = default;
};

struct FactorFilters {
  std::optional<std::set<std::string>> concepts;  // subject OR object
  bool exact_concepts = false;                    // disable ontology-subtree expansion
  std::optional<std::string> region_prefix;
  std::optional<BoundingBox> bbox;
  std::optional<std::pair<Date, Date>> time_overlap;
  bool operator==(const FactorFilters&) const = default;
};

struct FacetQuery {
  DocFilters doc;
  RelFilters rel;
  FactorFilters factor;

  bool operator==(const FacetQuery&) const = default;

  /// Throws InvalidQuery on violated invariants.
  void validate() const;
  bool empty() const;
};

FacetQuery facet_query_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FacetQuery& q);

/// Facet names used in FacetResult::facet_counts.
inline constexpr const char* kFacetPolarity = "polarity";
inline constexpr const char* kFacetSource = "source";
inline constexpr const char* kFacetYear = "year";
inline constexpr const char* kFacetRegion = "region";

/// Applies the facet value `value` of facet `facet` to `q` (the query the UI
/// would run after a click). Throws InvalidArgument on unknown facet names.
FacetQuery select_facet(FacetQuery q, const std::string& facet, const std::string& value);

struct FacetResult {
  std::vector<std::string> statement_ids;  // ascending
  std::map<std::string, std::map<std::string, std::size_t>> facet_counts;
  std::size_t total = 0;
};

nlohmann::json to_json(const FacetResult& r);

/// Single-statement predicate shared by the planner's verify step.
bool matches(const CausalStatement& s, const FacetQuery& q);

/// Conjunctive faceted query over the active statements of one snapshot.
/// Facet counts use the remove-own-filter convention: counts for facet F are
/// taken over the query with F's filter removed.
FacetResult run_query(const Corpus& corpus, const FacetQuery& q);

struct ConceptCount {
  std::string concept_id;
  std::size_t statements = 0;
};

struct Compartment {
  std::string parent;  // ontology parent path ("" for top-level concepts)
  std::vector<ConceptCount> members;  // by concept id
};

struct SuppressedEdges {
  std::size_t relationship_count = 0;
};

struct NestedProjection {
  std::vector<Compartment> compartments;  // by parent path
  std::variant<std::vector<AggregatedEdge>, SuppressedEdges> edges;

  bool suppressed() const { return std::holds_alternative<SuppressedEdges>(edges); }
};

inline constexpr std::size_t kDefaultEdgeLimit = 2000;

/// Groups matching concepts by ontology parent. Edges are hidden once the
/// number of distinct relationships exceeds `edge_limit`.
NestedProjection nested_graph_projection(const Corpus& corpus, const FacetResult& result,
                                         std::size_t edge_limit = kDefaultEdgeLimit,
                                         BeliefPolicy policy = BeliefPolicy::Max);

nlohmann::json to_json(const NestedProjection& p);

}  // namespace cagkit
