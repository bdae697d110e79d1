#pragma once

#include "cagkit/aggregation.hpp"
#include "cagkit/store.hpp"
#include "cagkit/suggest.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cagkit {

enum class AcyclicityPolicy { Enforced, Relaxed };

std::string_view to_string(AcyclicityPolicy p);
std::optional<AcyclicityPolicy> parse_acyclicity_policy(std::string_view text);

enum class ActionKind {
  DiscardStatement,
  RestoreStatement,
  SetStatementPolarity,
  RemapConcept,
  SetEdgeOverride,
  ClearEdgeOverride,
  AddNode,
  RemoveNode,
  AddEdge,
  RemoveEdge,
  MergeImport,
  MergeNodes,
};

std::string_view to_string(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view text);

/// One audit-log entry. Actions that share `version` were applied atomically
/// by a single mutation.
struct CurationAction {
  ActionKind kind = ActionKind::AddNode;
  nlohmann::json payload = nlohmann::json::object();
  std::string actor;
  std::string timestamp;
  std::uint64_t version = 0;

  bool operator==(const CurationAction&) const = default;
};

nlohmann::json to_json(const CurationAction& a);
CurationAction curation_action_from_json(const nlohmann::json& j);

struct ModelEdge {
  std::string subject;
  std::string object;
  std::vector<std::string> members;  // every attached statement, ascending
  std::optional<Polarity> override;
  AggregatedEdge aggregate;          // over active members

  bool operator==(const ModelEdge&) const = default;
};

struct CagModel {
  std::string id;
  std::string name;
  std::string created_at;
  std::uint64_t version = 1;
  AcyclicityPolicy policy = AcyclicityPolicy::Enforced;
  std::map<std::string, std::optional<std::string>> nodes;  // concept -> label override
  std::map<ConceptPair, ModelEdge> edges;
  std::map<std::string, StatementPatch> overlay;  // model-scoped statement curation
  std::vector<CurationAction> audit_log;

  bool operator==(const CagModel&) const = default;

  bool has_node(std::string_view concept_id) const { return nodes.count(std::string(concept_id)) > 0; }
  const ModelEdge* find_edge(std::string_view subject, std::string_view object) const;
  /// Empty model carrying only the identity fields (the replay origin).
  CagModel header() const;
};

/// Serialization shared by the export file and the API. `with_aggregates`
/// adds computed edge fields; the import path ignores them.
nlohmann::json to_json(const CagModel& m, bool with_aggregates = true);
/// Restores stored state (nodes, edges, overlay, audit) without replaying.
/// Aggregates are left empty; callers refresh them against a corpus.
CagModel model_from_json(const nlohmann::json& j);

struct EngineContext {
  const Corpus& corpus;
  BeliefPolicy belief_policy = BeliefPolicy::Max;
};

struct PolarityChange {
  ConceptPair pair;
  std::optional<AggregatePolarity> before;  // nullopt: edge did not exist
  std::optional<AggregatePolarity> after;   // nullopt: edge removed
};

struct AmbiguousEdge {
  ConceptPair pair;
  std::string reason;  // "conflicting_overrides" | "ambiguous_polarity"
  bool operator==(const AmbiguousEdge&) const = default;
};

struct MutationReport {
  std::vector<PolarityChange> polarity_changes;
  std::vector<ConceptPair> skipped_edges;
  std::vector<ConceptPair> dropped_self_loops;
  std::vector<AmbiguousEdge> ambiguous_edges;
};

nlohmann::json to_json(const MutationReport& r);

/// Applies one atomic group of actions as version `model.version + 1`. On any
/// failure the exception propagates and `model` is left untouched.
MutationReport apply_actions(CagModel& model, std::vector<CurationAction> actions, const EngineContext& ctx);

/// Rebuilds a model from its header and audit log.
CagModel replay(const CagModel& model, const EngineContext& ctx);

// Helpers shared by the merge module.

/// Statement as seen by this model (corpus view plus model overlay).
std::optional<CausalStatement> effective_statement(const CagModel& m, const EngineContext& ctx,
                                                   std::string_view statement_id);
/// Members of the model view that currently match (subject, object) and are active.
std::vector<std::string> matching_statements(const CagModel& m, const EngineContext& ctx, std::string_view subject,
                                             std::string_view object);
/// Directed path from -> ... -> to over model edges, if any.
std::optional<std::vector<std::string>> find_path(const CagModel& m, std::string_view from, std::string_view to);
/// A directed cycle in the model, if any.
std::optional<std::vector<std::string>> find_cycle(const CagModel& m);
void refresh_edge(ModelEdge& edge, const CagModel& m, const EngineContext& ctx);
std::size_t active_support(const ModelEdge& edge, const CagModel& m, const EngineContext& ctx);
/// Creates (s, o) if absent, checking acyclicity under the enforced policy,
/// then unions `statement_ids` into its members.
void add_or_extend_edge(CagModel& m, const EngineContext& ctx, const std::string& s, const std::string& o,
                        const std::vector<std::string>& statement_ids);

}  // namespace cagkit
