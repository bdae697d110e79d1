#pragma once

#include "cagkit/cag.hpp"
#include "cagkit/embeddings.hpp"
#include "cagkit/ontology.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cagkit {

inline constexpr double kDefaultDuplicateThreshold = 0.9;

/// Lowercase, punctuation to spaces, whitespace collapsed.
std::string normalize_name(std::string_view name);
std::size_t levenshtein(std::string_view a, std::string_view b);
/// 1 - levenshtein / max length over normalized names.
double string_similarity(std::string_view a, std::string_view b);

struct NodeMatch {
  std::string a;
  std::string b;
  double score = 0.0;
  std::string recommendation;  // "merge" | "keep"
  bool operator==(const NodeMatch&) const = default;
};

/// Node label shown to the analyst.
std::string node_display_name(const CagModel& m, const Ontology& ontology, std::string_view concept_id);

/// Unordered node pairs scoring at least `threshold`, best first. A pair
/// already joined by an edge is recommended "keep".
std::vector<NodeMatch> find_near_duplicates(const CagModel& m, const Ontology& ontology,
                                            const EmbeddingTable* embeddings = nullptr,
                                            double threshold = kDefaultDuplicateThreshold);

struct MergeReport {
  std::vector<std::string> imported_models;
  std::vector<NodeMatch> node_matches;
  std::vector<AmbiguousEdge> ambiguous_edges;
  std::vector<ConceptPair> skipped_edges;
};

nlohmann::json to_json(const NodeMatch& m);
nlohmann::json to_json(const MergeReport& r);

/// MergeImport payload carrying a self-contained copy of each source.
nlohmann::json merge_import_payload(const std::vector<const CagModel*>& sources);

// Action bodies, invoked from apply_actions.
void apply_merge_import(CagModel& m, const nlohmann::json& payload, const EngineContext& ctx,
                        MutationReport& report);
void apply_merge_nodes(CagModel& m, const std::string& survivor, const std::string& absorbed,
                       const EngineContext& ctx, MutationReport& report);

}  // namespace cagkit
