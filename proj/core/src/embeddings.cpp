#include "cagkit/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cagkit {

using nlohmann::json;

WordVectors WordVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open embedding file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

WordVectors WordVectors::parse(std::string_view text) {
  WordVectors out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> v;
    std::string num;
    while (fields >> num) {
      char* end = nullptr;
      const double x = std::strtod(num.c_str(), &end);
      if (end == num.c_str() || *end != '\0' || !std::isfinite(x))
        throw Error(ErrorCode::InvalidValue, "embedding line " + std::to_string(line_no) + ": bad number '" + num + "'");
      v.push_back(x);
    }
    if (v.empty()) throw Error(ErrorCode::InvalidValue, "embedding line " + std::to_string(line_no) + " has no values");
    if (out.dimension == 0) {
      out.dimension = v.size();
    } else if (v.size() != out.dimension) {
      throw Error(ErrorCode::DimensionMismatch,
                  "embedding line " + std::to_string(line_no) + " has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(out.dimension));
    }
    for (auto& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.vectors.insert_or_assign(std::move(token), std::move(v));
  }
  if (out.vectors.empty()) throw Error(ErrorCode::EmptyEmbeddingFile, "embedding file has no vectors");
  return out;
}

void EmbeddingTable::set(ConceptEmbedding row) {
  if (dimension_ == 0) dimension_ = row.vector.size();
  if (row.vector.size() != dimension_)
    throw Error(ErrorCode::DimensionMismatch, "embedding for " + row.concept_id + " has wrong dimension");
  for (double x : row.vector)
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidValue, "non-finite embedding for " + row.concept_id);
  auto key = row.concept_id;
  rows_.insert_or_assign(std::move(key), std::move(row));
}

const ConceptEmbedding* EmbeddingTable::find(std::string_view concept_id) const {
  auto it = rows_.find(concept_id);
  return it == rows_.end() ? nullptr : &it->second;
}

std::optional<double> EmbeddingTable::cosine(std::string_view a, std::string_view b) const {
  const auto* ea = find(a);
  const auto* eb = find(b);
  if (!ea || !eb || ea->missing || eb->missing) return std::nullopt;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    dot += ea->vector[i] * eb->vector[i];
    na += ea->vector[i] * ea->vector[i];
    nb += eb->vector[i] * eb->vector[i];
  }
  if (na == 0 || nb == 0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

json EmbeddingTable::to_json() const {
  json rows = json::array();
  for (const auto& [_, r] : rows_) {
    rows.push_back({{"concept", r.concept_id},
                    {"vector", r.vector},
                    {"cluster", r.cluster_id},
                    {"imputed", r.imputed},
                    {"missing", r.missing}});
  }
  return {{"dimension", dimension_}, {"rows", std::move(rows)}};
}

EmbeddingTable EmbeddingTable::from_json(const json& j) {
  EmbeddingTable t(j.at("dimension").get<std::size_t>());
  for (const auto& r : j.at("rows")) {
    ConceptEmbedding row;
    row.concept_id = r.at("concept").get<std::string>();
    row.vector = r.at("vector").get<std::vector<double>>();
    row.cluster_id = r.value("cluster", kNoiseCluster);
    row.imputed = r.value("imputed", false);
    row.missing = r.value("missing", false);
    t.set(std::move(row));
  }
  return t;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << to_json().dump() << "\n";
  }
  std::filesystem::rename(tmp, path);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open embedding table " + path.string());
  return from_json(json::parse(in));
}

std::optional<std::vector<double>> concept_vector(const WordVectors& words, std::string_view concept_id) {
  std::vector<double> sum(words.dimension, 0.0);
  std::size_t found = 0;
  std::string leaf(concept_leaf(concept_id));
  std::istringstream tokens(leaf);
  std::string token;
  while (std::getline(tokens, token, '_')) {
    if (token.empty()) continue;
    auto it = words.vectors.find(token);
    if (it == words.vectors.end()) continue;
    for (std::size_t i = 0; i < words.dimension; ++i) sum[i] += it->second[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (auto& x : sum) x /= static_cast<double>(found);
  return sum;
}

namespace {

void assign_clusters(EmbeddingTable& table, const HdbscanParams& params) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> points;
  for (const auto& [id, row] : table.rows()) {
    if (row.missing) continue;
    ids.push_back(id);
    points.push_back(row.vector);
  }
  const auto labels = hdbscan(points, params);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ConceptEmbedding row = *table.find(ids[i]);
    row.cluster_id = labels[i];
    table.set(std::move(row));
  }
}

}  // namespace

EmbeddingTable build_embeddings_and_clusters(const WordVectors& words, const Ontology& ontology,
                                             const HdbscanParams& params) {
  if (words.vectors.empty()) throw Error(ErrorCode::EmptyEmbeddingFile, "no word vectors");
  std::map<std::string, std::vector<double>> direct;
  for (const Concept* c : ontology.concepts()) {
    if (auto v = concept_vector(words, c->id)) direct.emplace(c->id, std::move(*v));
  }

  EmbeddingTable table(words.dimension);
  for (const Concept* c : ontology.concepts()) {
    ConceptEmbedding row;
    row.concept_id = c->id;
    if (auto it = direct.find(c->id); it != direct.end()) {
      row.vector = it->second;
    } else {
      std::vector<double> mean(words.dimension, 0.0);
      std::size_t n = 0;
      for (const auto& sib : ontology.siblings(c->id)) {
        auto s = direct.find(sib);
        if (s == direct.end()) continue;
        for (std::size_t i = 0; i < words.dimension; ++i) mean[i] += s->second[i];
        ++n;
      }
      if (n > 0) {
        for (auto& x : mean) x /= static_cast<double>(n);
        row.imputed = true;
      } else {
        row.missing = true;
      }
      row.vector = std::move(mean);
    }
    table.set(std::move(row));
  }
  assign_clusters(table, params);
  return table;
}

EmbeddingTable build_embeddings_and_clusters(const std::filesystem::path& vector_file, const Ontology& ontology,
                                             const HdbscanParams& params) {
  return build_embeddings_and_clusters(WordVectors::load(vector_file), ontology, params);
}

EmbeddingTable cluster_concept_vectors(const std::map<std::string, std::vector<double>>& vectors,
                                       const HdbscanParams& params) {
  EmbeddingTable table;
  for (const auto& [id, v] : vectors) {
    ConceptEmbedding row;
    row.concept_id = id;
    row.vector = v;
    row.missing = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    table.set(std::move(row));
  }
  assign_clusters(table, params);
  return table;
}

}  // namespace cagkit
