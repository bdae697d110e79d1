#pragma once

#include "cagkit/hdbscan.hpp"
#include "cagkit/ontology.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cagkit {

/// Pretrained token vectors, text format: `token v1 v2 ... vD` per line.
struct WordVectors {
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  static WordVectors load(const std::filesystem::path& path);
  static WordVectors parse(std::string_view text);
};

struct ConceptEmbedding {
  std::string concept_id;
  std::vector<double> vector;
  int cluster_id = kNoiseCluster;
  bool imputed = false;  // mean of ontology siblings
  bool missing = false;  // zero vector, no source available

  bool operator==(const ConceptEmbedding&) const = default;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  void set(ConceptEmbedding row);
  const ConceptEmbedding* find(std::string_view concept_id) const;
  const std::map<std::string, ConceptEmbedding, std::less<>>& rows() const { return rows_; }

  /// Cosine similarity; nullopt when either side is absent or a zero vector.
  std::optional<double> cosine(std::string_view a, std::string_view b) const;

  nlohmann::json to_json() const;
  static EmbeddingTable from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

 private:
  std::size_t dimension_ = 0;
  std::map<std::string, ConceptEmbedding, std::less<>> rows_;
};

/// Averages the vectors of the tokens of a concept's last path segment.
std::optional<std::vector<double>> concept_vector(const WordVectors& words, std::string_view concept_id);

/// Embeds every ontology concept (missing ones take the mean of their
/// siblings, else a zero vector flagged as noise) and clusters them.
EmbeddingTable build_embeddings_and_clusters(const WordVectors& words, const Ontology& ontology,
                                             const HdbscanParams& params);
EmbeddingTable build_embeddings_and_clusters(const std::filesystem::path& vector_file, const Ontology& ontology,
                                             const HdbscanParams& params);

/// Clusters concept vectors given directly (all must share one dimension).
EmbeddingTable cluster_concept_vectors(const std::map<std::string, std::vector<double>>& vectors,
                                       const HdbscanParams& params);

}  // namespace cagkit
