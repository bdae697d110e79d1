#include "cagkit/workspace.hpp"

#include <algorithm>
#include <fstream>

namespace cagkit {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const MutationResult& r) {
  return {{"model", to_json(r.model)}, {"version", r.model.version}, {"changed", r.changed},
          {"report", to_json(r.report)}};
}

Workspace::Workspace(StatementStore& store, fs::path models_dir, WorkspaceConfig config, Clock clock)
    : store_(store), models_dir_(std::move(models_dir)), config_(config), clock_(std::move(clock)) {
  if (!models_dir_.empty()) load_models();
}

void Workspace::set_embeddings(std::shared_ptr<const EmbeddingTable> table) {
  std::lock_guard lock(embeddings_mutex_);
  embeddings_ = std::move(table);
}

std::shared_ptr<const EmbeddingTable> Workspace::embeddings() const {
  std::lock_guard lock(embeddings_mutex_);
  return embeddings_;
}

void Workspace::load_models() {
  std::error_code ec;
  fs::create_directories(models_dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create models directory " + models_dir_.string());
  auto corpus = store_.snapshot();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(models_dir_))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::MalformedLine, "corrupt model file " + f.string() + ": " + ex.what());
    }
    auto entry = std::make_shared<Entry>();
    entry->model = refreshed(model_from_json(doc), *corpus);
    const auto& id = entry->model.id;
    if (id.rfind("cag-", 0) == 0) {
      try {
        next_seq_ = std::max<std::uint64_t>(next_seq_, std::stoull(id.substr(4)) + 1);
      } catch (const std::exception&) {
      }
    }
    models_.emplace(id, std::move(entry));
  }
}

void Workspace::persist(const CagModel& m) const {
  if (models_dir_.empty()) return;
  const fs::path target = models_dir_ / (m.id + ".json");
  const fs::path tmp = models_dir_ / (m.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << to_json(m, false).dump(1) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace " + target.string() + ": " + ec.message());
}

CagModel Workspace::refreshed(const CagModel& m, const Corpus& corpus) const {
  CagModel out = m;
  EngineContext ctx{corpus, config_.belief_policy};
  for (auto& [_, e] : out.edges) refresh_edge(e, out, ctx);
  return out;
}

std::string Workspace::next_id() { return "cag-" + std::to_string(next_seq_++); }

std::shared_ptr<Workspace::Entry> Workspace::entry(const std::string& id) const {
  std::shared_lock lock(models_mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw Error(ErrorCode::UnknownModel, "no model " + id, {{"model_id", id}});
  return it->second;
}

CagModel Workspace::create(const std::string& name, std::optional<AcyclicityPolicy> policy) {
  auto e = std::make_shared<Entry>();
  e->model.name = name;
  e->model.created_at = clock_();
  e->model.policy = policy.value_or(config_.default_policy);
  std::unique_lock lock(models_mutex_);
  e->model.id = next_id();
  persist(e->model);
  models_.emplace(e->model.id, e);
  return e->model;
}

std::vector<CagModel> Workspace::list() const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(models_mutex_);
    for (const auto& [_, e] : models_) entries.push_back(e);
  }
  std::vector<CagModel> out;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    out.push_back(e->model);
  }
  std::sort(out.begin(), out.end(), [](const CagModel& a, const CagModel& b) {
    if (a.id.size() != b.id.size()) return a.id.size() < b.id.size();
    return a.id < b.id;
  });
  return out;
}

CagModel Workspace::get(const std::string& id) const {
  auto e = entry(id);
  auto corpus = store_.snapshot();
  std::lock_guard lock(e->mutex);
  return refreshed(e->model, *corpus);
}

void Workspace::remove(const std::string& id) {
  std::unique_lock lock(models_mutex_);
  if (!models_.erase(id)) throw Error(ErrorCode::UnknownModel, "no model " + id, {{"model_id", id}});
  if (!models_dir_.empty()) {
    std::error_code ec;
    fs::remove(models_dir_ / (id + ".json"), ec);
  }
}

MutationResult Workspace::mutate(
    const std::string& id, Version expected,
    const std::function<std::vector<CurationAction>(const CagModel&, const EngineContext&, MutationReport&)>& plan,
    const std::string& actor) {
  auto e = entry(id);
  auto corpus = store_.snapshot();
  EngineContext ctx{*corpus, config_.belief_policy};
  std::lock_guard lock(e->mutex);
  if (expected && *expected != e->model.version)
    throw Error(ErrorCode::VersionConflict, "model " + id + " is at version " + std::to_string(e->model.version),
                {{"expected", *expected}, {"actual", e->model.version}});

  MutationResult result;
  auto actions = plan(e->model, ctx, result.report);
  if (actions.empty()) {
    result.model = refreshed(e->model, *corpus);
    return result;
  }
  const std::string now = clock_();
  for (auto& a : actions) {
    a.actor = actor;
    a.timestamp = now;
  }
  CagModel work = e->model;
  MutationReport applied = apply_actions(work, std::move(actions), ctx);
  persist(work);
  e->model = std::move(work);

  auto& r = result.report;
  r.polarity_changes = std::move(applied.polarity_changes);
  r.skipped_edges.insert(r.skipped_edges.end(), applied.skipped_edges.begin(), applied.skipped_edges.end());
  r.dropped_self_loops = std::move(applied.dropped_self_loops);
  r.ambiguous_edges = std::move(applied.ambiguous_edges);
  result.model = e->model;
  result.changed = true;
  return result;
}

namespace {

CurationAction action(ActionKind kind, json payload) {
  CurationAction a;
  a.kind = kind;
  a.payload = std::move(payload);
  return a;
}

}  // namespace

MutationResult Workspace::add_node(const std::string& id, const std::string& concept_id,
                                   const std::optional<std::string>& label, const std::string& actor,
                                   Version expected) {
  if (!is_valid_concept_id(concept_id))
    throw Error(ErrorCode::InvalidValue, "invalid concept id '" + concept_id + "'");
  return mutate(
      id, expected,
      [&](const CagModel& m, const EngineContext&, MutationReport&) {
        auto it = m.nodes.find(concept_id);
        if (it != m.nodes.end() && (!label || it->second == label)) return std::vector<CurationAction>{};
        json p = {{"concept", concept_id}};
        if (label) p["label"] = *label;
        return std::vector{action(ActionKind::AddNode, std::move(p))};
      },
      actor);
}

MutationResult Workspace::remove_node(const std::string& id, const std::string& concept_id, const std::string& actor,
                                      Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel&, const EngineContext&, MutationReport&) {
        return std::vector{action(ActionKind::RemoveNode, {{"concept", concept_id}})};
      },
      actor);
}

MutationResult Workspace::add_edge(const std::string& id, const std::string& subject, const std::string& object,
                                   const std::string& actor, Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel& m, const EngineContext& ctx, MutationReport&) {
        if (subject == object) throw Error(ErrorCode::SelfLoop, "edge endpoints must differ", {{"concept", subject}});
        return std::vector{action(ActionKind::AddEdge, {{"subject", subject},
                                                        {"object", object},
                                                        {"statement_ids", matching_statements(m, ctx, subject, object)}})};
      },
      actor);
}

MutationResult Workspace::remove_edge(const std::string& id, const std::string& subject, const std::string& object,
                                      const std::string& actor, Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel&, const EngineContext&, MutationReport&) {
        return std::vector{action(ActionKind::RemoveEdge, {{"subject", subject}, {"object", object}})};
      },
      actor);
}

MutationResult Workspace::curate(const std::string& id, std::vector<CurationAction> actions, const std::string& actor,
                                 Version expected) {
  if (actions.empty()) throw Error(ErrorCode::InvalidArgument, "curation batch is empty");
  return mutate(
      id, expected, [&](const CagModel&, const EngineContext&, MutationReport&) { return actions; }, actor);
}

MutationResult Workspace::set_edge_override(const std::string& id, const std::string& subject,
                                            const std::string& object, std::optional<Polarity> override,
                                            const std::string& actor, Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel&, const EngineContext&, MutationReport&) {
        json p = {{"subject", subject}, {"object", object}};
        if (!override) return std::vector{action(ActionKind::ClearEdgeOverride, std::move(p))};
        p["polarity"] = to_string(*override);
        return std::vector{action(ActionKind::SetEdgeOverride, std::move(p))};
      },
      actor);
}

MutationResult Workspace::materialize_search(const std::string& id, const FacetResult& result,
                                             const std::optional<std::set<ConceptPair>>& selected,
                                             const std::string& actor, Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel& m, const EngineContext& ctx, MutationReport& report) {
        std::map<ConceptPair, std::vector<std::string>> groups;
        for (const auto& sid : result.statement_ids) {
          auto s = effective_statement(m, ctx, sid);
          if (!s) throw Error(ErrorCode::UnknownStatement, "unknown statement " + sid, {{"statement_id", sid}});
          if (s->discarded || s->subject == s->object) continue;
          ConceptPair pair{s->subject, s->object};
          if (selected && !selected->count(pair)) continue;
          groups[pair].push_back(sid);
        }
        std::vector<std::pair<ConceptPair, std::vector<std::string>>> ordered(groups.begin(), groups.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });

        CagModel trial = m;
        std::vector<CurationAction> actions;
        for (auto& [pair, ids] : ordered) {
          std::sort(ids.begin(), ids.end());
          try {
            add_or_extend_edge(trial, ctx, pair.first, pair.second, ids);
          } catch (const Error& err) {
            if (err.code() != ErrorCode::WouldCreateCycle) throw;
            report.skipped_edges.push_back(pair);
            continue;
          }
          actions.push_back(action(ActionKind::AddEdge,
                                   {{"subject", pair.first}, {"object", pair.second}, {"statement_ids", ids}}));
        }
        return actions;
      },
      actor);
}

std::pair<MutationResult, MergeReport> Workspace::import_models(const std::string& id,
                                                                const std::vector<std::string>& sources,
                                                                const std::string& actor, Version expected) {
  if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "no source models given");
  std::vector<CagModel> copies;
  for (const auto& src : sources) {
    if (src == id) throw Error(ErrorCode::SelfImport, "a model cannot import itself", {{"model_id", id}});
    auto e = entry(src);
    std::lock_guard lock(e->mutex);
    copies.push_back(e->model);
  }
  entry(id);
  std::vector<const CagModel*> ptrs;
  for (const auto& c : copies) ptrs.push_back(&c);
  json payload = merge_import_payload(ptrs);

  auto result = mutate(
      id, expected,
      [&](const CagModel&, const EngineContext&, MutationReport&) {
        return std::vector{action(ActionKind::MergeImport, payload)};
      },
      actor);

  MergeReport report;
  report.imported_models = sources;
  report.ambiguous_edges = result.report.ambiguous_edges;
  report.skipped_edges = result.report.skipped_edges;
  auto corpus = store_.snapshot();
  auto emb = embeddings();
  report.node_matches =
      cagkit::find_near_duplicates(result.model, corpus->ontology(), emb.get(), config_.duplicate_threshold);
  return {std::move(result), std::move(report)};
}

MutationResult Workspace::apply_node_merge(const std::string& id, const std::string& survivor,
                                           const std::string& absorbed, const std::string& actor, Version expected) {
  return mutate(
      id, expected,
      [&](const CagModel&, const EngineContext&, MutationReport&) {
        return std::vector{action(ActionKind::MergeNodes, {{"survivor", survivor}, {"absorbed", absorbed}})};
      },
      actor);
}

std::vector<NodeMatch> Workspace::find_near_duplicates(const std::string& id, std::optional<double> threshold) const {
  auto model = get(id);
  auto corpus = store_.snapshot();
  auto emb = embeddings();
  return cagkit::find_near_duplicates(model, corpus->ontology(), emb.get(),
                                      threshold.value_or(config_.duplicate_threshold));
}

json Workspace::export_model(const std::string& id) const { return to_json(get(id), false); }

CagModel Workspace::import_file(const json& doc, const std::string& actor) {
  CagModel source = model_from_json(doc);
  auto corpus = store_.snapshot();
  EngineContext ctx{*corpus, config_.belief_policy};

  CagModel built = source.header();
  if (built.name.empty()) built.name = "imported";
  built.created_at = clock_();
  if (!doc.contains("policy")) built.policy = config_.default_policy;

  if (!source.audit_log.empty()) {
    CagModel replay_from = built;
    replay_from.audit_log = source.audit_log;
    built = replay(replay_from, ctx);
  } else {
    std::vector<CurationAction> actions;
    for (const auto& [c, label] : source.nodes) {
      json p = {{"concept", c}};
      if (label) p["label"] = *label;
      actions.push_back(action(ActionKind::AddNode, std::move(p)));
    }
    for (const auto& [pair, e] : source.edges) {
      actions.push_back(action(ActionKind::AddEdge,
                               {{"subject", pair.first}, {"object", pair.second}, {"statement_ids", e.members}}));
      if (e.override)
        actions.push_back(action(ActionKind::SetEdgeOverride,
                                 {{"subject", pair.first}, {"object", pair.second}, {"polarity", to_string(*e.override)}}));
    }
    if (!actions.empty()) {
      const std::string now = clock_();
      for (auto& a : actions) {
        a.actor = actor;
        a.timestamp = now;
      }
      apply_actions(built, std::move(actions), ctx);
    }
  }

  auto e = std::make_shared<Entry>();
  std::unique_lock lock(models_mutex_);
  built.id = next_id();
  e->model = std::move(built);
  persist(e->model);
  models_.emplace(e->model.id, e);
  return e->model;
}

}  // namespace cagkit
