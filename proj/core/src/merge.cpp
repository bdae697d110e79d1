#include "cagkit/merge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace cagkit {

using nlohmann::json;

std::string normalize_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double string_similarity(std::string_view a, std::string_view b) {
  const auto na = normalize_name(a);
  const auto nb = normalize_name(b);
  const std::size_t longest = std::max(na.size(), nb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(na, nb)) / static_cast<double>(longest);
}

std::string node_display_name(const CagModel& m, const Ontology& ontology, std::string_view concept_id) {
  auto it = m.nodes.find(std::string(concept_id));
  if (it != m.nodes.end() && it->second) return *it->second;
  return ontology.display_name(concept_id);
}

std::vector<NodeMatch> find_near_duplicates(const CagModel& m, const Ontology& ontology,
                                            const EmbeddingTable* embeddings, double threshold) {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  for (const auto& [id, _] : m.nodes) {
    ids.push_back(id);
    names.push_back(node_display_name(m, ontology, id));
  }
  std::vector<NodeMatch> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      double score = string_similarity(names[i], names[j]);
      if (embeddings) {
        if (auto cos = embeddings->cosine(ids[i], ids[j])) score = std::max(score, std::clamp(*cos, 0.0, 1.0));
      }
      if (score < threshold) continue;
      const bool linked = m.find_edge(ids[i], ids[j]) || m.find_edge(ids[j], ids[i]);
      out.push_back({ids[i], ids[j], score, linked ? "keep" : "merge"});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const NodeMatch& x, const NodeMatch& y) { return x.score > y.score; });
  return out;
}

json to_json(const NodeMatch& m) {
  return {{"a", m.a}, {"b", m.b}, {"score", m.score}, {"recommendation", m.recommendation}};
}

json to_json(const MergeReport& r) {
  json matches = json::array();
  for (const auto& m : r.node_matches) matches.push_back(to_json(m));
  json ambiguous = json::array();
  for (const auto& a : r.ambiguous_edges)
    ambiguous.push_back({{"subject", a.pair.first}, {"object", a.pair.second}, {"reason", a.reason}});
  json skipped = json::array();
  for (const auto& p : r.skipped_edges) skipped.push_back({{"subject", p.first}, {"object", p.second}});
  return {{"imported_models", r.imported_models},
          {"node_matches", std::move(matches)},
          {"ambiguous_edges", std::move(ambiguous)},
          {"skipped_edges", std::move(skipped)}};
}

json merge_import_payload(const std::vector<const CagModel*>& sources) {
  json list = json::array();
  for (const CagModel* src : sources) {
    json j = to_json(*src, false);
    j.erase("audit");
    j.erase("created_at");
    j.erase("version");
    j.erase("policy");
    list.push_back(std::move(j));
  }
  return {{"sources", std::move(list)}};
}

namespace {

struct IncomingEdge {
  std::set<std::string> members;
  std::set<Polarity> overrides;
};

void union_members(std::vector<std::string>& into, const std::set<std::string>& extra) {
  std::set<std::string> all(into.begin(), into.end());
  all.insert(extra.begin(), extra.end());
  into.assign(all.begin(), all.end());
}

}  // namespace

void apply_merge_import(CagModel& m, const json& payload, const EngineContext& ctx, MutationReport& report) {
  if (!payload.contains("sources") || !payload["sources"].is_array())
    throw Error(ErrorCode::InvalidArgument, "MergeImport payload needs 'sources'");

  std::map<ConceptPair, IncomingEdge> incoming;
  for (const auto& src : payload["sources"]) {
    for (const auto& n : src.value("nodes", json::array())) {
      const auto c = n.at("concept").get<std::string>();
      if (!is_valid_concept_id(c)) throw Error(ErrorCode::InvalidValue, "invalid concept id '" + c + "'");
      std::optional<std::string> label;
      if (n.contains("label") && n["label"].is_string()) label = n["label"].get<std::string>();
      auto [it, inserted] = m.nodes.emplace(c, label);
      if (!inserted && !it->second && label) it->second = label;
    }
    for (const auto& p : src.value("overlay", json::array())) {
      StatementPatch patch = patch_from_json(p);
      if (!ctx.corpus.find(patch.statement_id)) continue;
      m.overlay.emplace(patch.statement_id, patch);
    }
    for (const auto& e : src.value("edges", json::array())) {
      ConceptPair pair{e.at("subj").get<std::string>(), e.at("obj").get<std::string>()};
      if (pair.first == pair.second) throw Error(ErrorCode::SelfLoop, "imported edge is a self-loop");
      auto& in = incoming[pair];
      for (const auto& id : e.value("statement_ids", json::array())) {
        const auto sid = id.get<std::string>();
        if (!ctx.corpus.find(sid))
          throw Error(ErrorCode::UnknownStatement, "unknown statement " + sid, {{"statement_id", sid}});
        in.members.insert(sid);
      }
      if (e.contains("override") && e["override"].is_string()) {
        auto pol = parse_polarity(e["override"].get<std::string>());
        if (!pol || *pol == Polarity::Unknown) throw Error(ErrorCode::InvalidValue, "bad override polarity");
        in.overrides.insert(*pol);
      }
    }
  }

  auto resolve_override = [&](const ConceptPair& pair, std::set<Polarity> overrides,
                              const std::optional<Polarity>& current) -> std::optional<Polarity> {
    if (current) overrides.insert(*current);
    if (overrides.size() == 1) return *overrides.begin();
    if (overrides.size() > 1) report.ambiguous_edges.push_back({pair, "conflicting_overrides"});
    return std::nullopt;
  };

  std::vector<std::pair<std::size_t, ModelEdge>> fresh;
  for (auto& [pair, in] : incoming) {
    auto it = m.edges.find(pair);
    if (it != m.edges.end()) {
      union_members(it->second.members, in.members);
      it->second.override = resolve_override(pair, in.overrides, it->second.override);
      continue;
    }
    ModelEdge e;
    e.subject = pair.first;
    e.object = pair.second;
    e.members.assign(in.members.begin(), in.members.end());
    e.override = resolve_override(pair, in.overrides, std::nullopt);
    const std::size_t support = active_support(e, m, ctx);
    fresh.emplace_back(support, std::move(e));
  }
  std::stable_sort(fresh.begin(), fresh.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  for (auto& [_, e] : fresh) {
    ConceptPair pair{e.subject, e.object};
    if (m.policy == AcyclicityPolicy::Enforced && find_path(m, e.object, e.subject)) {
      report.skipped_edges.push_back(pair);
      std::erase_if(report.ambiguous_edges, [&](const AmbiguousEdge& a) { return a.pair == pair; });
      continue;
    }
    m.nodes.emplace(e.subject, std::nullopt);
    m.nodes.emplace(e.object, std::nullopt);
    m.edges.emplace(pair, std::move(e));
  }

  std::set<ConceptPair> flagged;
  for (const auto& a : report.ambiguous_edges) flagged.insert(a.pair);
  for (auto& [pair, e] : m.edges) {
    refresh_edge(e, m, ctx);
    if (e.aggregate.aggregate_polarity == AggregatePolarity::Ambiguous && !flagged.count(pair))
      report.ambiguous_edges.push_back({pair, "ambiguous_polarity"});
  }
}

void apply_merge_nodes(CagModel& m, const std::string& survivor, const std::string& absorbed,
                       const EngineContext& ctx, MutationReport& report) {
  for (const auto* c : {&survivor, &absorbed})
    if (!m.has_node(*c)) throw Error(ErrorCode::UnknownNode, "no node " + *c, {{"concept", *c}});
  if (survivor == absorbed) throw Error(ErrorCode::InvalidArgument, "cannot merge a node into itself");

  auto rename = [&](const std::string& c) { return c == absorbed ? survivor : c; };

  std::vector<ModelEdge> moved;
  for (auto it = m.edges.begin(); it != m.edges.end();) {
    if (it->first.first == absorbed || it->first.second == absorbed) {
      moved.push_back(std::move(it->second));
      it = m.edges.erase(it);
    } else {
      ++it;
    }
  }

  for (auto& e : moved) {
    const std::string s = rename(e.subject);
    const std::string o = rename(e.object);
    if (s == o) {
      report.dropped_self_loops.push_back({e.subject, e.object});
      continue;
    }
    for (const auto& id : e.members) {
      auto st = effective_statement(m, ctx, id);
      if (!st) continue;
      StatementPatch change;
      if (st->subject == absorbed) change.subject = survivor;
      if (st->object == absorbed) change.object = survivor;
      if (change.empty() || rename(st->subject) == rename(st->object)) continue;
      auto& entry = m.overlay[id];
      entry.statement_id = id;
      entry.merge(change);
    }
    auto [it, inserted] = m.edges.try_emplace({s, o});
    ModelEdge& target = it->second;
    if (inserted) {
      target.subject = s;
      target.object = o;
      target.override = e.override;
    } else if (e.override && target.override != e.override) {
      if (target.override) {
        target.override.reset();
        report.ambiguous_edges.push_back({{s, o}, "conflicting_overrides"});
      } else {
        target.override = e.override;
      }
    }
    std::set<std::string> ids(e.members.begin(), e.members.end());
    union_members(target.members, ids);
  }

  m.nodes.erase(absorbed);
}

}  // namespace cagkit
