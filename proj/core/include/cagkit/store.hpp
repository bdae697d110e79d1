#pragma once

#include "cagkit/ontology.hpp"
#include "cagkit/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cagkit {

/// Curation overlay entry keyed by statement id. Present fields replace the
/// corresponding statement field; the ingest log itself is never rewritten.
struct StatementPatch {
  std::string statement_id;
  std::optional<bool> discarded;
  std::optional<Polarity> polarity;
  std::optional<std::string> subject;
  std::optional<std::string> object;

  bool operator==(const StatementPatch&) const = default;

  /// Folds `later` on top of this patch.
  void merge(const StatementPatch& later);
  bool empty() const { return !discarded && !polarity && !subject && !object; }
};

nlohmann::json to_json(const StatementPatch& p);
StatementPatch patch_from_json(const nlohmann::json& j);
CausalStatement apply_patch(CausalStatement s, const StatementPatch& p);

using StatementIndex = std::uint32_t;

/// Aggregated concept-graph neighbour: counterpart concept and the number of
/// active statements on that directed pair.
struct Neighbor {
  std::string concept_id;
  std::size_t support = 0;
};

/// Immutable, indexed view of the corpus with the overlay applied. Readers
/// hold a shared_ptr to one of these, so they never see a half-applied write.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<CausalStatement> base, std::map<std::string, StatementPatch, std::less<>> overlay,
         Ontology ontology);

  std::span<const CausalStatement> statements() const { return statements_; }
  const CausalStatement& at(StatementIndex i) const { return statements_[i]; }
  std::size_t size() const { return statements_.size(); }
  std::size_t active_count() const { return active_count_; }

  const CausalStatement* find(std::string_view id) const;
  std::optional<StatementIndex> index_of(std::string_view id) const;

  /// Statements on (subject, object), belief descending then id ascending.
  std::vector<CausalStatement> statements_for_pair(std::string_view subject, std::string_view object,
                                                   bool include_discarded) const;
  /// Active statements where the concept is subject or object.
  std::size_t concept_statement_count(std::string_view concept_id) const;
  /// Active statements on the directed pair.
  std::size_t pair_support(std::string_view subject, std::string_view object) const;

  // Raw index postings, ascending statement index, discarded included.
  std::span<const StatementIndex> by_subject(std::string_view concept_id) const;
  std::span<const StatementIndex> by_object(std::string_view concept_id) const;
  std::span<const StatementIndex> by_pair(std::string_view subject, std::string_view object) const;
  std::span<const StatementIndex> by_doc(std::string_view doc_id) const;
  std::span<const StatementIndex> by_region_prefix(std::string_view prefix) const;
  std::span<const StatementIndex> by_year(int year) const;

  /// Aggregated concept graph (active statements only), neighbours sorted by id.
  std::span<const Neighbor> outgoing(std::string_view concept_id) const;
  std::span<const Neighbor> incoming(std::string_view concept_id) const;

  const Ontology& ontology() const { return ontology_; }
  const std::vector<CausalStatement>& base() const { return base_; }
  const std::map<std::string, StatementPatch, std::less<>>& overlay() const { return overlay_; }

  std::size_t distinct_doc_count() const { return by_doc_.size(); }

 private:
  using Postings = std::vector<StatementIndex>;
  using PairKey = std::pair<std::string, std::string>;

  void rebuild();

  std::vector<CausalStatement> base_;
  std::map<std::string, StatementPatch, std::less<>> overlay_;
  Ontology ontology_;

  std::vector<CausalStatement> statements_;
  std::size_t active_count_ = 0;
  std::map<std::string, StatementIndex, std::less<>> by_id_;
  std::map<std::string, Postings, std::less<>> by_subject_;
  std::map<std::string, Postings, std::less<>> by_object_;
  std::map<PairKey, Postings> by_pair_;
  std::map<std::string, Postings, std::less<>> by_doc_;
  std::map<std::string, Postings, std::less<>> by_region_;
  std::map<int, Postings> by_year_;
  std::map<std::string, std::size_t, std::less<>> concept_counts_;
  std::map<PairKey, std::size_t> pair_support_;
  std::map<std::string, std::vector<Neighbor>, std::less<>> outgoing_;
  std::map<std::string, std::vector<Neighbor>, std::less<>> incoming_;
};

enum class IngestMode { Replace, Append };

struct IngestIssue {
  std::size_t line = 0;
  std::vector<ValidationIssue> errors;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<IngestIssue> errors;
};

nlohmann::json to_json(const IngestReport& r);

struct StoreStats {
  std::size_t statements = 0;
  std::size_t active_statements = 0;
  std::size_t concepts = 0;
  std::size_t documents = 0;
  std::optional<std::string> last_ingest;
};

/// Store directory layout:
///   statements.jsonl   append-only log in the ingest wire format
///   overlay.jsonl      curation journal (StatementPatch per line)
///   ontology.tsv       optional ontology copy
///   meta.json          last ingest time
///   LOCK               advisory lock shared with other processes
/// Indexes live in memory and are rebuilt when the store is opened.
class StatementStore {
 public:
  /// Opens (creating if needed) a persistent store.
  explicit StatementStore(std::filesystem::path dir);
  /// Memory-only store, used by tests and embedding.
  StatementStore();

  StatementStore(const StatementStore&) = delete;
  StatementStore& operator=(const StatementStore&) = delete;

  IngestReport ingest(const std::filesystem::path& file, IngestMode mode);
  IngestReport ingest_text(std::string_view jsonl, IngestMode mode);
  /// Inline records (JSON array of ingest objects).
  IngestReport ingest_records(const nlohmann::json& records, IngestMode mode);

  void load_ontology(const std::filesystem::path& file);
  void load_ontology_text(std::string_view text);

  /// Applies curation patches atomically; UnknownStatement if any id is absent.
  void apply_patches(const std::vector<StatementPatch>& patches);

  std::shared_ptr<const Corpus> snapshot() const;
  StoreStats stats() const;
  /// Re-reads the on-disk log and journal (picks up writes by other processes).
  void reload();

  const std::filesystem::path& dir() const { return dir_; }
  bool persistent() const { return !dir_.empty(); }

 private:
  struct Line {
    std::size_t number;
    std::string text;
  };
  IngestReport ingest_lines(const std::vector<Line>& lines, IngestMode mode);
  void publish(std::shared_ptr<const Corpus> next);
  void load_from_disk();
  void write_meta();

  std::filesystem::path dir_;
  mutable std::mutex snapshot_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const Corpus> current_;
  Ontology base_ontology_;
  std::optional<std::string> last_ingest_;
};

/// RAII advisory file lock (flock) on `<dir>/LOCK`; shared or exclusive.
class StoreLock {
 public:
  StoreLock(const std::filesystem::path& dir, bool exclusive);
  ~StoreLock();
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

}  // namespace cagkit
