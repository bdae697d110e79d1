#pragma once

#include "cagkit/cag.hpp"
#include "cagkit/embeddings.hpp"
#include "cagkit/merge.hpp"
#include "cagkit/search.hpp"
#include "cagkit/store.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace cagkit {

struct WorkspaceConfig {
  BeliefPolicy belief_policy = BeliefPolicy::Max;
  AcyclicityPolicy default_policy = AcyclicityPolicy::Enforced;
  double duplicate_threshold = kDefaultDuplicateThreshold;
};

using Clock = std::function<std::string()>;

struct MutationResult {
  CagModel model;
  MutationReport report;
  bool changed = false;
};

nlohmann::json to_json(const MutationResult& r);

/// Owns the CAG models over one statement store. Writes to a model are
/// serialized and version-checked; different models never block each other.
class Workspace {
 public:
  /// `models_dir` empty keeps models in memory only.
  explicit Workspace(StatementStore& store, std::filesystem::path models_dir = {}, WorkspaceConfig config = {},
                     Clock clock = utc_timestamp_now);

  const WorkspaceConfig& config() const { return config_; }
  StatementStore& store() { return store_; }

  void set_embeddings(std::shared_ptr<const EmbeddingTable> table);
  std::shared_ptr<const EmbeddingTable> embeddings() const;

  CagModel create(const std::string& name, std::optional<AcyclicityPolicy> policy = std::nullopt);
  std::vector<CagModel> list() const;
  /// Current state with edge aggregates refreshed against the latest corpus.
  CagModel get(const std::string& id) const;
  void remove(const std::string& id);

  using Version = std::optional<std::uint64_t>;

  MutationResult add_node(const std::string& id, const std::string& concept_id,
                          const std::optional<std::string>& label = std::nullopt, const std::string& actor = {},
                          Version expected = std::nullopt);
  MutationResult remove_node(const std::string& id, const std::string& concept_id, const std::string& actor = {},
                             Version expected = std::nullopt);
  MutationResult add_edge(const std::string& id, const std::string& subject, const std::string& object,
                          const std::string& actor = {}, Version expected = std::nullopt);
  MutationResult remove_edge(const std::string& id, const std::string& subject, const std::string& object,
                             const std::string& actor = {}, Version expected = std::nullopt);
  MutationResult curate(const std::string& id, std::vector<CurationAction> actions, const std::string& actor = {},
                        Version expected = std::nullopt);
  MutationResult set_edge_override(const std::string& id, const std::string& subject, const std::string& object,
                                   std::optional<Polarity> override, const std::string& actor = {},
                                   Version expected = std::nullopt);
  /// Adds the result's pairs (or only `selected`) as edges. Pairs that would
  /// close a cycle are skipped and listed in the report.
  MutationResult materialize_search(const std::string& id, const FacetResult& result,
                                    const std::optional<std::set<ConceptPair>>& selected = std::nullopt,
                                    const std::string& actor = {}, Version expected = std::nullopt);
  std::pair<MutationResult, MergeReport> import_models(const std::string& id, const std::vector<std::string>& sources,
                                                       const std::string& actor = {},
                                                       Version expected = std::nullopt);
  MutationResult apply_node_merge(const std::string& id, const std::string& survivor, const std::string& absorbed,
                                  const std::string& actor = {}, Version expected = std::nullopt);
  std::vector<NodeMatch> find_near_duplicates(const std::string& id, std::optional<double> threshold = std::nullopt) const;

  nlohmann::json export_model(const std::string& id) const;
  /// Creates a new model from an export document. The audit log is replayed
  /// when present; otherwise nodes and edges are rebuilt as fresh actions.
  CagModel import_file(const nlohmann::json& doc, const std::string& actor = {});

 private:
  struct Entry {
    std::mutex mutex;
    CagModel model;
  };

  std::shared_ptr<Entry> entry(const std::string& id) const;
  MutationResult mutate(const std::string& id, Version expected,
                        const std::function<std::vector<CurationAction>(const CagModel&, const EngineContext&,
                                                                        MutationReport&)>& plan,
                        const std::string& actor);
  void persist(const CagModel& m) const;
  void load_models();
  CagModel refreshed(const CagModel& m, const Corpus& corpus) const;
  std::string next_id();

  StatementStore& store_;
  std::filesystem::path models_dir_;
  WorkspaceConfig config_;
  Clock clock_;

  mutable std::shared_mutex models_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> models_;
  std::uint64_t next_seq_ = 1;

  mutable std::mutex embeddings_mutex_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
};

}  // namespace cagkit
