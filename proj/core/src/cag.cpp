#include "cagkit/cag.hpp"

#include "cagkit/merge.hpp"

#include <algorithm>
#include <array>

namespace cagkit {

using nlohmann::json;

std::string_view to_string(AcyclicityPolicy p) { return p == AcyclicityPolicy::Enforced ? "enforced" : "relaxed"; }

std::optional<AcyclicityPolicy> parse_acyclicity_policy(std::string_view text) {
  if (text == "enforced") return AcyclicityPolicy::Enforced;
  if (text == "relaxed") return AcyclicityPolicy::Relaxed;
  return std::nullopt;
}

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 12> kActionNames{{
    {ActionKind::DiscardStatement, "DiscardStatement"},
    {ActionKind::RestoreStatement, "RestoreStatement"},
    {ActionKind::SetStatementPolarity, "SetStatementPolarity"},
    {ActionKind::RemapConcept, "RemapConcept"},
    {ActionKind::SetEdgeOverride, "SetEdgeOverride"},
    {ActionKind::ClearEdgeOverride, "ClearEdgeOverride"},
    {ActionKind::AddNode, "AddNode"},
    {ActionKind::RemoveNode, "RemoveNode"},
    {ActionKind::AddEdge, "AddEdge"},
    {ActionKind::RemoveEdge, "RemoveEdge"},
    {ActionKind::MergeImport, "MergeImport"},
    {ActionKind::MergeNodes, "MergeNodes"},
}};

}  // namespace

std::string_view to_string(ActionKind k) {
  for (const auto& [kind, name] : kActionNames)
    if (kind == k) return name;
  return "Unknown";
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  for (const auto& [kind, name] : kActionNames)
    if (name == text) return kind;
  return std::nullopt;
}

json to_json(const CurationAction& a) {
  return {{"kind", to_string(a.kind)},
          {"payload", a.payload},
          {"actor", a.actor},
          {"timestamp", a.timestamp},
          {"version", a.version}};
}

CurationAction curation_action_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(ErrorCode::InvalidArgument, "curation action needs a string 'kind'");
  auto kind = parse_action_kind(j["kind"].get<std::string>());
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown curation action kind " + j["kind"].dump());
  CurationAction a;
  a.kind = *kind;
  if (j.contains("payload")) a.payload = j["payload"];
  if (!a.payload.is_object()) throw Error(ErrorCode::InvalidArgument, "curation payload must be an object");
  a.actor = j.value("actor", "");
  a.timestamp = j.value("timestamp", "");
  a.version = j.value("version", std::uint64_t{0});
  return a;
}

const ModelEdge* CagModel::find_edge(std::string_view subject, std::string_view object) const {
  auto it = edges.find(ConceptPair{std::string(subject), std::string(object)});
  return it == edges.end() ? nullptr : &it->second;
}

CagModel CagModel::header() const {
  CagModel h;
  h.id = id;
  h.name = name;
  h.created_at = created_at;
  h.policy = policy;
  return h;
}

json to_json(const CagModel& m, bool with_aggregates) {
  json nodes = json::array();
  for (const auto& [c, label] : m.nodes) {
    json n = {{"concept", c}};
    if (label) n["label"] = *label;
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& [_, e] : m.edges) {
    json je = {{"subj", e.subject}, {"obj", e.object}, {"statement_ids", e.members}};
    if (e.override) je["override"] = to_string(*e.override);
    if (with_aggregates) je["aggregate"] = to_json(e.aggregate);
    edges.push_back(std::move(je));
  }
  json overlay = json::array();
  for (const auto& [_, p] : m.overlay) overlay.push_back(to_json(p));
  json audit = json::array();
  for (const auto& a : m.audit_log) audit.push_back(to_json(a));
  return {{"id", m.id},
          {"name", m.name},
          {"created_at", m.created_at},
          {"version", m.version},
          {"policy", to_string(m.policy)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"overlay", std::move(overlay)},
          {"audit", std::move(audit)}};
}

CagModel model_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "model document must be an object");
  CagModel m;
  m.id = j.value("id", "");
  m.name = j.value("name", "");
  m.created_at = j.value("created_at", "");
  m.version = j.value("version", std::uint64_t{1});
  if (j.contains("policy")) {
    auto p = parse_acyclicity_policy(j["policy"].get<std::string>());
    if (!p) throw Error(ErrorCode::InvalidValue, "unknown acyclicity policy");
    m.policy = *p;
  }
  for (const auto& n : j.value("nodes", json::array())) {
    std::optional<std::string> label;
    if (n.contains("label") && n["label"].is_string()) label = n["label"].get<std::string>();
    m.nodes.emplace(n.at("concept").get<std::string>(), label);
  }
  for (const auto& e : j.value("edges", json::array())) {
    ModelEdge edge;
    edge.subject = e.at("subj").get<std::string>();
    edge.object = e.at("obj").get<std::string>();
    for (const auto& id : e.value("statement_ids", json::array())) edge.members.push_back(id.get<std::string>());
    std::sort(edge.members.begin(), edge.members.end());
    edge.members.erase(std::unique(edge.members.begin(), edge.members.end()), edge.members.end());
    if (e.contains("override") && e["override"].is_string()) edge.override = parse_polarity(e["override"].get<std::string>());
    edge.aggregate.subject = edge.subject;
    edge.aggregate.object = edge.object;
    m.edges.emplace(ConceptPair{edge.subject, edge.object}, std::move(edge));
  }
  for (const auto& p : j.value("overlay", json::array())) {
    auto patch = patch_from_json(p);
    m.overlay.emplace(patch.statement_id, patch);
  }
  for (const auto& a : j.value("audit", json::array())) m.audit_log.push_back(curation_action_from_json(a));
  return m;
}

json to_json(const MutationReport& r) {
  auto pair_json = [](const ConceptPair& p) { return json{{"subject", p.first}, {"object", p.second}}; };
  json changes = json::array();
  for (const auto& c : r.polarity_changes) {
    json j = pair_json(c.pair);
    j["before"] = c.before ? json(to_string(*c.before)) : json(nullptr);
    j["after"] = c.after ? json(to_string(*c.after)) : json(nullptr);
    changes.push_back(std::move(j));
  }
  json skipped = json::array();
  for (const auto& p : r.skipped_edges) skipped.push_back(pair_json(p));
  json dropped = json::array();
  for (const auto& p : r.dropped_self_loops) dropped.push_back(pair_json(p));
  json ambiguous = json::array();
  for (const auto& a : r.ambiguous_edges) {
    json j = pair_json(a.pair);
    j["reason"] = a.reason;
    ambiguous.push_back(std::move(j));
  }
  return {{"polarity_changes", std::move(changes)},
          {"skipped_edges", std::move(skipped)},
          {"dropped_self_loops", std::move(dropped)},
          {"ambiguous_edges", std::move(ambiguous)}};
}

// ---------------------------------------------------------------- helpers

std::optional<CausalStatement> effective_statement(const CagModel& m, const EngineContext& ctx,
                                                   std::string_view statement_id) {
  const CausalStatement* base = ctx.corpus.find(statement_id);
  if (!base) return std::nullopt;
  auto it = m.overlay.find(std::string(statement_id));
  return it == m.overlay.end() ? *base : apply_patch(*base, it->second);
}

std::vector<std::string> matching_statements(const CagModel& m, const EngineContext& ctx, std::string_view subject,
                                             std::string_view object) {
  std::set<std::string> out;
  auto consider = [&](const std::string& id) {
    auto s = effective_statement(m, ctx, id);
    if (s && !s->discarded && s->subject == subject && s->object == object) out.insert(id);
  };
  for (StatementIndex i : ctx.corpus.by_pair(subject, object)) consider(ctx.corpus.at(i).id);
  for (const auto& [id, patch] : m.overlay)
    if (patch.subject || patch.object) consider(id);
  return {out.begin(), out.end()};
}

namespace {

std::map<std::string, std::vector<std::string>> adjacency(const CagModel& m) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [pair, _] : m.edges) adj[pair.first].push_back(pair.second);
  return adj;
}

}  // namespace

std::optional<std::vector<std::string>> find_path(const CagModel& m, std::string_view from, std::string_view to) {
  const auto adj = adjacency(m);
  std::map<std::string, std::string> parent;
  std::vector<std::string> queue{std::string(from)};
  parent.emplace(std::string(from), std::string());
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::string cur = queue[head];
    if (cur == to) {
      std::vector<std::string> path;
      for (std::string at = cur; !at.empty(); at = parent[at]) {
        path.push_back(at);
        if (at == from) break;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (parent.emplace(next, cur).second) queue.push_back(next);
    }
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> find_cycle(const CagModel& m) {
  const auto adj = adjacency(m);
  std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
  std::vector<std::string> stack_path;
  struct Frame {
    std::string node;
    std::size_t next;
  };
  for (const auto& [start, _] : adj) {
    if (color[start] != 0) continue;
    std::vector<Frame> stack{{start, 0}};
    color[start] = 1;
    stack_path = {start};
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto it = adj.find(f.node);
      if (it == adj.end() || f.next == it->second.size()) {
        color[f.node] = 2;
        stack.pop_back();
        stack_path.pop_back();
        continue;
      }
      const std::string next = it->second[f.next++];
      if (color[next] == 1) {
        auto pos = std::find(stack_path.begin(), stack_path.end(), next);
        std::vector<std::string> cycle(pos, stack_path.end());
        cycle.push_back(next);
        return cycle;
      }
      if (color[next] == 0) {
        color[next] = 1;
        stack.push_back({next, 0});
        stack_path.push_back(next);
      }
    }
  }
  return std::nullopt;
}

namespace {

std::vector<CausalStatement> active_members(const ModelEdge& edge, const CagModel& m, const EngineContext& ctx) {
  std::vector<CausalStatement> out;
  for (const auto& id : edge.members) {
    auto s = effective_statement(m, ctx, id);
    if (!s || s->discarded || s->subject != edge.subject || s->object != edge.object) continue;
    out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace

void refresh_edge(ModelEdge& edge, const CagModel& m, const EngineContext& ctx) {
  edge.aggregate =
      aggregate_edge(edge.subject, edge.object, active_members(edge, m, ctx), edge.override, ctx.belief_policy);
}

std::size_t active_support(const ModelEdge& edge, const CagModel& m, const EngineContext& ctx) {
  return active_members(edge, m, ctx).size();
}

// ---------------------------------------------------------------- actions

namespace {

[[noreturn]] void bad_payload(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

std::string payload_string(const json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_string()) bad_payload(std::string("payload needs string '") + key + "'");
  return p[key].get<std::string>();
}

std::string payload_concept(const json& p, const char* key) {
  auto c = payload_string(p, key);
  if (!is_valid_concept_id(c)) throw Error(ErrorCode::InvalidValue, "invalid concept id '" + c + "'");
  return c;
}

std::vector<std::string> payload_ids(const json& p) {
  if (!p.contains("statement_ids") || !p["statement_ids"].is_array())
    bad_payload("payload needs array 'statement_ids'");
  std::vector<std::string> ids;
  for (const auto& v : p["statement_ids"]) {
    if (!v.is_string()) bad_payload("statement_ids must be strings");
    ids.push_back(v.get<std::string>());
  }
  return ids;
}

Polarity payload_choice_polarity(const json& p) {
  if (!p.contains("polarity") || !p["polarity"].is_string()) bad_payload("payload needs string 'polarity'");
  auto pol = parse_polarity(p["polarity"].get<std::string>());
  if (!pol || *pol == Polarity::Unknown) throw Error(ErrorCode::InvalidValue, "polarity must be same or opposite");
  return *pol;
}

void require_statement(const EngineContext& ctx, const std::string& id) {
  if (!ctx.corpus.find(id)) throw Error(ErrorCode::UnknownStatement, "unknown statement " + id, {{"statement_id", id}});
}

ModelEdge& require_edge(CagModel& m, const std::string& s, const std::string& o) {
  auto it = m.edges.find({s, o});
  if (it == m.edges.end())
    throw Error(ErrorCode::UnknownEdge, "no edge " + s + " -> " + o, {{"subject", s}, {"object", o}});
  return it->second;
}

void insert_sorted(std::vector<std::string>& v, const std::string& id) {
  auto pos = std::lower_bound(v.begin(), v.end(), id);
  if (pos == v.end() || *pos != id) v.insert(pos, id);
}

void set_overlay(CagModel& m, const std::string& id, const StatementPatch& change) {
  auto& entry = m.overlay[id];
  entry.statement_id = id;
  entry.merge(change);
}

void apply_one(CagModel& m, const CurationAction& a, const EngineContext& ctx, MutationReport& report) {
  const json& p = a.payload;
  switch (a.kind) {
    case ActionKind::AddNode: {
      const auto c = payload_concept(p, "concept");
      std::optional<std::string> label;
      if (p.contains("label") && p["label"].is_string()) label = p["label"].get<std::string>();
      auto [it, inserted] = m.nodes.emplace(c, label);
      if (!inserted && label) it->second = label;
      break;
    }
    case ActionKind::RemoveNode: {
      const auto c = payload_string(p, "concept");
      if (!m.has_node(c)) throw Error(ErrorCode::UnknownNode, "no node " + c, {{"concept", c}});
      std::erase_if(m.edges, [&](const auto& kv) { return kv.first.first == c || kv.first.second == c; });
      m.nodes.erase(c);
      break;
    }
    case ActionKind::AddEdge: {
      const auto s = payload_concept(p, "subject");
      const auto o = payload_concept(p, "object");
      add_or_extend_edge(m, ctx, s, o, p.contains("statement_ids") ? payload_ids(p) : matching_statements(m, ctx, s, o));
      break;
    }
    case ActionKind::RemoveEdge: {
      const auto s = payload_string(p, "subject");
      const auto o = payload_string(p, "object");
      require_edge(m, s, o);
      m.edges.erase({s, o});
      break;
    }
    case ActionKind::DiscardStatement:
    case ActionKind::RestoreStatement: {
      StatementPatch change;
      change.discarded = a.kind == ActionKind::DiscardStatement;
      for (const auto& id : payload_ids(p)) {
        require_statement(ctx, id);
        set_overlay(m, id, change);
      }
      break;
    }
    case ActionKind::SetStatementPolarity: {
      StatementPatch change;
      change.polarity = payload_choice_polarity(p);
      for (const auto& id : payload_ids(p)) {
        require_statement(ctx, id);
        set_overlay(m, id, change);
      }
      break;
    }
    case ActionKind::RemapConcept: {
      const auto from = payload_concept(p, "from");
      const auto to = payload_concept(p, "to");
      for (const auto& id : payload_ids(p)) {
        require_statement(ctx, id);
        auto s = *effective_statement(m, ctx, id);
        if (s.subject != from && s.object != from)
          throw Error(ErrorCode::InvalidArgument, "statement " + id + " is not grounded to " + from,
                      {{"statement_id", id}});
        StatementPatch change;
        change.subject = s.subject == from ? to : s.subject;
        change.object = s.object == from ? to : s.object;
        if (*change.subject == *change.object)
          throw Error(ErrorCode::SelfLoop, "remapping statement " + id + " would create a self-loop",
                      {{"statement_id", id}});
        // Move edge membership along with the grounding.
        bool was_member = false;
        for (auto& [_, e] : m.edges) {
          auto pos = std::find(e.members.begin(), e.members.end(), id);
          if (pos != e.members.end()) {
            e.members.erase(pos);
            was_member = true;
          }
        }
        set_overlay(m, id, change);
        if (was_member) add_or_extend_edge(m, ctx, *change.subject, *change.object, {id});
      }
      break;
    }
    case ActionKind::SetEdgeOverride: {
      auto& e = require_edge(m, payload_string(p, "subject"), payload_string(p, "object"));
      e.override = payload_choice_polarity(p);
      break;
    }
    case ActionKind::ClearEdgeOverride: {
      auto& e = require_edge(m, payload_string(p, "subject"), payload_string(p, "object"));
      e.override.reset();
      break;
    }
    case ActionKind::MergeImport:
      apply_merge_import(m, p, ctx, report);
      break;
    case ActionKind::MergeNodes:
      apply_merge_nodes(m, payload_string(p, "survivor"), payload_string(p, "absorbed"), ctx, report);
      break;
  }
}

std::map<ConceptPair, AggregatePolarity> polarity_map(const CagModel& m) {
  std::map<ConceptPair, AggregatePolarity> out;
  for (const auto& [pair, e] : m.edges) out.emplace(pair, e.aggregate.aggregate_polarity);
  return out;
}

}  // namespace

void add_or_extend_edge(CagModel& m, const EngineContext& ctx, const std::string& s, const std::string& o,
                        const std::vector<std::string>& statement_ids) {
  if (s == o) throw Error(ErrorCode::SelfLoop, "edge endpoints must differ", {{"concept", s}});
  for (const auto& id : statement_ids) {
    auto st = effective_statement(m, ctx, id);
    if (!st) throw Error(ErrorCode::UnknownStatement, "unknown statement " + id, {{"statement_id", id}});
    if (st->subject != s || st->object != o)
      throw Error(ErrorCode::MismatchedStatement, "statement " + id + " does not belong to " + s + " -> " + o,
                  {{"statement_id", id}});
  }
  auto it = m.edges.find({s, o});
  if (it == m.edges.end()) {
    if (m.policy == AcyclicityPolicy::Enforced) {
      if (auto path = find_path(m, o, s)) {
        std::vector<std::string> cycle{s};
        cycle.insert(cycle.end(), path->begin(), path->end());
        throw Error(ErrorCode::WouldCreateCycle, "edge " + s + " -> " + o + " would close a cycle",
                    {{"cycle", cycle}});
      }
    }
    m.nodes.emplace(s, std::nullopt);
    m.nodes.emplace(o, std::nullopt);
    ModelEdge e;
    e.subject = s;
    e.object = o;
    it = m.edges.emplace(ConceptPair{s, o}, std::move(e)).first;
  }
  for (const auto& id : statement_ids) insert_sorted(it->second.members, id);
}

MutationReport apply_actions(CagModel& model, std::vector<CurationAction> actions, const EngineContext& ctx) {
  if (actions.empty()) throw Error(ErrorCode::InvalidArgument, "mutation has no actions");
  CagModel work = model;
  MutationReport report;
  const auto before = polarity_map(work);
  const std::uint64_t version = model.version + 1;

  for (auto& a : actions) {
    a.version = version;
    apply_one(work, a, ctx, report);
  }
  for (auto& [_, e] : work.edges) refresh_edge(e, work, ctx);
  if (work.policy == AcyclicityPolicy::Enforced) {
    if (auto cycle = find_cycle(work))
      throw Error(ErrorCode::WouldCreateCycle, "mutation would leave a directed cycle", {{"cycle", *cycle}});
  }

  const auto after = polarity_map(work);
  for (const auto& [pair, pol] : before) {
    auto it = after.find(pair);
    if (it == after.end())
      report.polarity_changes.push_back({pair, pol, std::nullopt});
    else if (it->second != pol)
      report.polarity_changes.push_back({pair, pol, it->second});
  }
  for (const auto& [pair, pol] : after)
    if (!before.count(pair)) report.polarity_changes.push_back({pair, std::nullopt, pol});

  work.version = version;
  for (auto& a : actions) work.audit_log.push_back(std::move(a));
  model = std::move(work);
  return report;
}

CagModel replay(const CagModel& model, const EngineContext& ctx) {
  CagModel out = model.header();
  std::size_t i = 0;
  const auto& log = model.audit_log;
  while (i < log.size()) {
    std::size_t j = i;
    std::vector<CurationAction> group;
    while (j < log.size() && log[j].version == log[i].version) group.push_back(log[j++]);
    apply_actions(out, std::move(group), ctx);
    i = j;
  }
  return out;
}

}  // namespace cagkit
