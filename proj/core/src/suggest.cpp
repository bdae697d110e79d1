#include "cagkit/suggest.hpp"

#include <algorithm>
#include <cctype>

namespace cagkit {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<ConceptSuggestion> suggest_concepts(const Corpus& corpus, std::string_view query, std::size_t k) {
  const std::string q = lower(trim(query));
  if (q.empty()) throw Error(ErrorCode::EmptyQuery, "concept query is empty");

  std::vector<ConceptSuggestion> hits;
  for (const Concept* c : corpus.ontology().concepts()) {
    if (lower(c->display_name).find(q) == std::string::npos &&
        lower(concept_leaf(c->id)).find(q) == std::string::npos)
      continue;
    hits.push_back({c->id, c->display_name, corpus.concept_statement_count(c->id)});
  }
  std::sort(hits.begin(), hits.end(), [](const ConceptSuggestion& a, const ConceptSuggestion& b) {
    if (a.statements != b.statements) return a.statements > b.statements;
    return a.concept_id < b.concept_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

RelationshipSuggestions suggest_relationships(const Corpus& corpus, std::string_view node, std::size_t k,
                                              const std::set<ConceptPair>& exclude, BeliefPolicy policy) {
  RelationshipSuggestions out;
  auto build = [&](std::span<const Neighbor> neighbors, Direction dir, std::vector<RelationshipSuggestion>& dest) {
    for (const auto& n : neighbors) {
      ConceptPair pair = dir == Direction::Outgoing ? ConceptPair{std::string(node), n.concept_id}
                                                    : ConceptPair{n.concept_id, std::string(node)};
      if (exclude.count(pair)) continue;
      dest.push_back({pair.first, pair.second, n.support, AggregatePolarity::NoEvidence, dir});
    }
    std::stable_sort(dest.begin(), dest.end(), [dir](const RelationshipSuggestion& a, const RelationshipSuggestion& b) {
      if (a.support != b.support) return a.support > b.support;
      const auto& ca = dir == Direction::Outgoing ? a.object : a.subject;
      const auto& cb = dir == Direction::Outgoing ? b.object : b.subject;
      return ca < cb;
    });
    if (dest.size() > k) dest.resize(k);
    for (auto& s : dest) {
      auto stmts = corpus.statements_for_pair(s.subject, s.object, false);
      s.aggregate_polarity = aggregate_edge(s.subject, s.object, stmts, std::nullopt, policy).aggregate_polarity;
    }
  };
  build(corpus.incoming(node), Direction::Incoming, out.incoming);
  build(corpus.outgoing(node), Direction::Outgoing, out.outgoing);
  return out;
}

std::size_t IndirectPath::min_support() const {
  if (hop_support.empty()) return 0;
  return *std::min_element(hop_support.begin(), hop_support.end());
}

namespace {

double path_affinity(const std::vector<std::string>& concepts, const EmbeddingTable* embeddings) {
  if (!embeddings || concepts.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < concepts.size(); ++i)
    sum += embeddings->cosine(concepts[i], concepts[i + 1]).value_or(0.0);
  return sum / static_cast<double>(concepts.size() - 1);
}

}  // namespace

std::vector<IndirectPath> enumerate_paths(const Corpus& corpus, std::string_view source, std::string_view target,
                                          std::size_t max_hops, const EmbeddingTable* embeddings) {
  std::vector<IndirectPath> out;
  IndirectPath current;
  current.concepts.emplace_back(source);

  // Iterative DFS keeps the frame count bounded by max_hops.
  struct Frame {
    std::span<const Neighbor> neighbors;
    std::size_t next = 0;
  };
  std::vector<Frame> stack{{corpus.outgoing(source), 0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.neighbors.size()) {
      stack.pop_back();
      if (!current.hop_support.empty()) {
        current.concepts.pop_back();
        current.hop_support.pop_back();
      }
      continue;
    }
    const Neighbor& n = top.neighbors[top.next++];
    if (std::find(current.concepts.begin(), current.concepts.end(), n.concept_id) != current.concepts.end())
      continue;
    if (n.concept_id == target) {
      IndirectPath found = current;
      found.concepts.push_back(n.concept_id);
      found.hop_support.push_back(n.support);
      found.affinity = path_affinity(found.concepts, embeddings);
      out.push_back(std::move(found));
      continue;
    }
    if (current.hop_support.size() + 1 >= max_hops) continue;
    current.concepts.push_back(n.concept_id);
    current.hop_support.push_back(n.support);
    stack.push_back({corpus.outgoing(n.concept_id), 0});
  }
  return out;
}

bool path_rank_less(const IndirectPath& a, const IndirectPath& b) {
  if (a.hops() != b.hops()) return a.hops() < b.hops();
  if (a.min_support() != b.min_support()) return a.min_support() > b.min_support();
  if (a.affinity != b.affinity) return a.affinity > b.affinity;
  return a.concepts < b.concepts;
}

std::vector<IndirectPath> indirect_paths(const Corpus& corpus, std::string_view source, std::string_view target,
                                         std::size_t max_hops, std::size_t k, const EmbeddingTable* embeddings) {
  if (max_hops < 2 || max_hops > kMaxPathHops)
    throw Error(ErrorCode::InvalidArgument, "max_hops must lie in [2, " + std::to_string(kMaxPathHops) + "]");
  if (source == target) throw Error(ErrorCode::InvalidArgument, "source and target must differ");
  auto paths = enumerate_paths(corpus, source, target, max_hops, embeddings);
  if (paths.empty())
    throw Error(ErrorCode::NoPathFound,
                "no path from " + std::string(source) + " to " + std::string(target) + " within " +
                    std::to_string(max_hops) + " hops",
                {{"source", source}, {"target", target}, {"max_hops", max_hops}});
  std::sort(paths.begin(), paths.end(), path_rank_less);
  if (paths.size() > k) paths.resize(k);
  return paths;
}

json to_json(const ConceptSuggestion& s) {
  return {{"concept", s.concept_id}, {"display_name", s.display_name}, {"statements", s.statements}};
}

json to_json(const RelationshipSuggestions& s) {
  auto list = [](const std::vector<RelationshipSuggestion>& v) {
    json arr = json::array();
    for (const auto& r : v)
      arr.push_back({{"subject", r.subject},
                     {"object", r.object},
                     {"support", r.support},
                     {"polarity", to_string(r.aggregate_polarity)},
                     {"direction", r.direction == Direction::Incoming ? "incoming" : "outgoing"}});
    return arr;
  };
  return {{"incoming", list(s.incoming)}, {"outgoing", list(s.outgoing)}};
}

json to_json(const IndirectPath& p, const EmbeddingTable* embeddings) {
  json j = {{"concepts", p.concepts}, {"hop_support", p.hop_support}, {"affinity", p.affinity}};
  if (embeddings) {
    json clusters = json::array();
    for (const auto& c : p.concepts) {
      const auto* row = embeddings->find(c);
      clusters.push_back(row ? json(row->cluster_id) : json(nullptr));
    }
    j["clusters"] = std::move(clusters);
  }
  return j;
}

}  // namespace cagkit
