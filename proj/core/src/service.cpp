#include "cagkit/service.hpp"

#include "cagkit/layout.hpp"
#include "cagkit/merge.hpp"
#include "cagkit/nested_layout.hpp"
#include "cagkit/search.hpp"
#include "cagkit/statement_json.hpp"
#include "cagkit/suggest.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <thread>

namespace cagkit {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::FileNotFound:
    case ErrorCode::NoPathFound:
    case ErrorCode::UnknownModel:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownEdge:
    case ErrorCode::UnknownStatement:
    case ErrorCode::NotFound: return 404;
    case ErrorCode::WouldCreateCycle:
    case ErrorCode::VersionConflict: return 409;
    case ErrorCode::IoError: return 500;
    case ErrorCode::StoreUnavailable:
    case ErrorCode::PortInUse: return 503;
    default: return 400;
  }
}

json error_body(const Error& e) {
  json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (!e.details().is_null()) err["details"] = e.details();
  return {{"error", std::move(err)}};
}

namespace {

std::string percent_decode(std::string_view s, bool plus_is_space) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else if (plus_is_space && s[i] == '+') {
      out.push_back(' ');
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

struct Request {
  std::string method;
  std::vector<std::string> path;
  std::map<std::string, std::string> query;
  json body;
  std::map<std::string, std::string> headers;

  std::optional<std::string> param(const std::string& k) const {
    auto it = query.find(k);
    if (it == query.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::string> header(const std::string& k) const {
    auto it = headers.find(k);
    if (it == headers.end()) return std::nullopt;
    return it->second;
  }
};

Request parse_request(const std::string& method, const std::string& target, const std::string& body,
                      const std::map<std::string, std::string>& headers) {
  Request r;
  r.method = method;
  const auto qpos = target.find('?');
  const std::string_view path = std::string_view(target).substr(0, qpos);
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) r.path.push_back(percent_decode(path.substr(start, end - start), false));
    start = end + 1;
  }
  if (qpos != std::string::npos) {
    std::string_view q = std::string_view(target).substr(qpos + 1);
    std::size_t s = 0;
    while (s <= q.size()) {
      auto e = q.find('&', s);
      if (e == std::string_view::npos) e = q.size();
      auto kv = q.substr(s, e - s);
      if (!kv.empty()) {
        auto eq = kv.find('=');
        r.query[percent_decode(kv.substr(0, eq), true)] =
            eq == std::string_view::npos ? "" : percent_decode(kv.substr(eq + 1), true);
      }
      s = e + 1;
    }
  }
  for (const auto& [k, v] : headers) {
    std::string lk = k;
    std::transform(lk.begin(), lk.end(), lk.begin(), [](unsigned char c) { return std::tolower(c); });
    r.headers[lk] = v;
  }
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) {
    r.body = json::object();
  } else {
    try {
      r.body = json::parse(body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadRequest, std::string("request body is not valid JSON: ") + e.what());
    }
  }
  return r;
}

std::size_t to_size(const std::string& v, const char* name) {
  try {
    std::size_t used = 0;
    long long n = std::stoll(v, &used);
    if (used != v.size() || n < 0) throw std::invalid_argument(name);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadRequest, std::string("parameter '") + name + "' must be a non-negative integer");
  }
}

double to_real(const std::string& v, const char* name) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(name);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadRequest, std::string("parameter '") + name + "' must be a number");
  }
}

std::string body_string(const json& b, const char* key) {
  if (!b.is_object() || !b.contains(key) || !b[key].is_string())
    throw Error(ErrorCode::BadRequest, std::string("body needs string field '") + key + "'");
  return b[key].get<std::string>();
}

template <typename T>
json paginate(const std::vector<T>& items, const Request& r, const char* key) {
  const std::size_t limit = r.param("limit") ? to_size(*r.param("limit"), "limit") : 100;
  const std::size_t offset = r.param("offset") ? to_size(*r.param("offset"), "offset") : 0;
  json page = json::array();
  for (std::size_t i = offset; i < items.size() && i < offset + limit; ++i) page.push_back(items[i]);
  return {{key, std::move(page)}, {"total", items.size()}, {"limit", limit}, {"offset", offset}};
}

}  // namespace

struct ApiService::Impl {
  StatementStore& store;
  Workspace& workspace;
  Config config;
  httplib::Server server;
  std::thread thread;

  Impl(StatementStore& s, Workspace& w, Config c) : store(s), workspace(w), config(std::move(c)) {}

  std::string resolve_concept(const Corpus& corpus, const std::string& q) const {
    if (corpus.ontology().contains(q)) return q;
    if (auto id = corpus.ontology().resolve(q)) return *id;
    return q;
  }

  std::optional<std::uint64_t> expected_version(const Request& r) const {
    if (r.body.is_object() && r.body.contains("expected_version")) {
      const auto& v = r.body["expected_version"];
      if (!v.is_number_unsigned()) throw Error(ErrorCode::BadRequest, "expected_version must be a positive integer");
      return v.get<std::uint64_t>();
    }
    if (auto h = r.header("if-match")) {
      std::string v = *h;
      v.erase(std::remove(v.begin(), v.end(), '"'), v.end());
      return to_size(v, "If-Match");
    }
    if (auto p = r.param("expected_version")) return to_size(*p, "expected_version");
    return std::nullopt;
  }

  std::string actor(const Request& r) const { return r.header("x-actor").value_or("api"); }

  json model_json(const CagModel& m, bool with_layout) const {
    json j = to_json(m);
    if (with_layout) {
      auto corpus = store.snapshot();
      j["layout"] = to_json(flow_layout(layout_graph(m, corpus->ontology()), config.layout(m.policy)));
    }
    return j;
  }

  ApiResponse mutation(const MutationResult& r) const {
    json j = {{"model", model_json(r.model, false)},
              {"version", r.model.version},
              {"changed", r.changed},
              {"report", to_json(r.report)}};
    return {200, std::move(j)};
  }

  FacetResult result_from_body(const json& b, const Corpus& corpus) const {
    if (b.contains("statement_ids")) {
      FacetResult r;
      for (const auto& id : b["statement_ids"]) r.statement_ids.push_back(id.get<std::string>());
      std::sort(r.statement_ids.begin(), r.statement_ids.end());
      r.total = r.statement_ids.size();
      return r;
    }
    return run_query(corpus, facet_query_from_json(b.value("query", json::object())));
  }

  ApiResponse dispatch(const Request& r) {
    const auto& p = r.path;
    const auto& m = r.method;
    auto corpus = store.snapshot();

    if (p.size() == 1 && p[0] == "health" && m == "GET") {
      auto st = store.stats();
      return {200,
              {{"status", "ok"},
               {"statements", st.statements},
               {"active_statements", st.active_statements},
               {"concepts", st.concepts},
               {"documents", st.documents},
               {"last_ingest", st.last_ingest ? json(*st.last_ingest) : json(nullptr)}}};
    }
    if (p.size() == 1 && p[0] == "ingest" && m == "POST") {
      const std::string mode_s = r.body.value("mode", "append");
      if (mode_s != "append" && mode_s != "replace") throw Error(ErrorCode::BadRequest, "mode must be append or replace");
      const IngestMode mode = mode_s == "replace" ? IngestMode::Replace : IngestMode::Append;
      if (r.body.contains("ontology")) store.load_ontology(body_string(r.body, "ontology"));
      IngestReport report;
      if (r.body.contains("records")) report = store.ingest_records(r.body["records"], mode);
      else if (r.body.contains("path")) report = store.ingest(body_string(r.body, "path"), mode);
      else throw Error(ErrorCode::BadRequest, "ingest needs 'path' or 'records'");
      json j = to_json(report);
      j["statements"] = store.stats().statements;
      return {200, std::move(j)};
    }
    if (p.size() == 1 && p[0] == "search" && m == "POST") {
      FacetQuery q = facet_query_from_json(r.body);
      FacetResult res = run_query(*corpus, q);
      json j = paginate(res.statement_ids, r, "statement_ids");
      j["facet_counts"] = res.facet_counts;
      if (r.param("include") == std::optional<std::string>("statements")) {
        json sts = json::array();
        for (const auto& id : j["statement_ids"]) sts.push_back(to_json(*corpus->find(id.get<std::string>())));
        j["statements"] = std::move(sts);
      }
      if (r.param("view") == std::optional<std::string>("nested")) {
        const std::size_t limit = r.param("edge_limit") ? to_size(*r.param("edge_limit"), "edge_limit") : config.edge_limit;
        auto proj = nested_graph_projection(*corpus, res, limit, config.belief_policy);
        j["projection"] = to_json(proj);
        NestedLayoutOptions nopt;
        nopt.grid_step = config.grid_step;
        j["layout"] = to_json(nested_layout(proj, nopt));
      }
      return {200, std::move(j)};
    }
    if (p.size() == 2 && p[0] == "concepts" && p[1] == "suggest" && m == "GET") {
      const std::size_t k = r.param("k") ? to_size(*r.param("k"), "k") : 10;
      json list = json::array();
      for (const auto& s : suggest_concepts(*corpus, r.param("q").value_or(""), k)) list.push_back(to_json(s));
      return {200, {{"suggestions", std::move(list)}}};
    }
    if (p.size() == 4 && p[0] == "concepts" && p[2] == "relationships" && p[3] == "suggest" && m == "GET") {
      const std::size_t k = r.param("k") ? to_size(*r.param("k"), "k") : 5;
      std::set<ConceptPair> exclude;
      if (auto mid = r.param("model")) {
        for (const auto& [pair, _] : workspace.get(*mid).edges) exclude.insert(pair);
      }
      const std::string node = resolve_concept(*corpus, p[1]);
      json j = to_json(suggest_relationships(*corpus, node, k, exclude, config.belief_policy));
      j["concept"] = node;
      return {200, std::move(j)};
    }
    if (p.size() == 1 && p[0] == "paths" && m == "GET") {
      const std::string source = resolve_concept(*corpus, r.param("source").value_or(""));
      const std::string target = resolve_concept(*corpus, r.param("target").value_or(""));
      const std::size_t hops = r.param("max_hops") ? to_size(*r.param("max_hops"), "max_hops") : config.max_hops;
      const std::size_t k = r.param("k") ? to_size(*r.param("k"), "k") : 5;
      auto emb = workspace.embeddings();
      json list = json::array();
      for (const auto& path : indirect_paths(*corpus, source, target, hops, k, emb.get()))
        list.push_back(to_json(path, emb.get()));
      return {200, {{"source", source}, {"target", target}, {"paths", std::move(list)}}};
    }
    if (!p.empty() && p[0] == "cags") return cags(r, *corpus);
    throw Error(ErrorCode::NotFound, "no route for " + m + " /" + [&] {
      std::string s;
      for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "/" : "") + p[i];
      return s;
    }());
  }

  ApiResponse cags(const Request& r, const Corpus& corpus) {
    const auto& p = r.path;
    const auto& m = r.method;
    if (p.size() == 1 && m == "POST") {
      std::optional<AcyclicityPolicy> policy;
      if (r.body.contains("policy")) {
        policy = parse_acyclicity_policy(body_string(r.body, "policy"));
        if (!policy) throw Error(ErrorCode::BadRequest, "policy must be enforced or relaxed");
      }
      auto model = workspace.create(r.body.value("name", "untitled"), policy);
      return {201, model_json(model, false)};
    }
    if (p.size() == 1 && m == "GET") {
      std::vector<json> items;
      for (const auto& model : workspace.list())
        items.push_back({{"id", model.id},
                         {"name", model.name},
                         {"version", model.version},
                         {"nodes", model.nodes.size()},
                         {"edges", model.edges.size()}});
      return {200, paginate(items, r, "models")};
    }
    if (p.size() == 2 && p[1] == "import-file" && m == "POST") {
      const json& doc = r.body.contains("document") ? r.body["document"] : r.body;
      return {201, model_json(workspace.import_file(doc, actor(r)), false)};
    }
    if (p.size() < 2) throw Error(ErrorCode::NotFound, "no such route");
    const std::string& id = p[1];
    const auto ev = expected_version(r);

    if (p.size() == 2) {
      if (m == "GET") return {200, model_json(workspace.get(id), true)};
      if (m == "DELETE") {
        workspace.remove(id);
        return {200, {{"deleted", id}}};
      }
    }
    const std::string& sub = p[2];
    if (sub == "nodes") {
      if (p.size() == 3 && m == "POST") {
        std::optional<std::string> label;
        if (r.body.contains("label") && r.body["label"].is_string()) label = r.body["label"].get<std::string>();
        const auto c = resolve_concept(corpus, body_string(r.body, "concept"));
        return mutation(workspace.add_node(id, c, label, actor(r), ev));
      }
      if (p.size() == 4 && m == "DELETE") return mutation(workspace.remove_node(id, p[3], actor(r), ev));
    }
    if (sub == "edges") {
      if (p.size() == 3 && m == "POST") {
        const auto s = resolve_concept(corpus, body_string(r.body, "subject"));
        const auto o = resolve_concept(corpus, body_string(r.body, "object"));
        auto res = mutation(workspace.add_edge(id, s, o, actor(r), ev));
        res.body["edge"] = edge_json(workspace.get(id), s, o, corpus, false);
        return res;
      }
      if (p.size() == 5 && m == "DELETE") return mutation(workspace.remove_edge(id, p[3], p[4], actor(r), ev));
      if (p.size() == 5 && m == "GET") return {200, edge_json(workspace.get(id), p[3], p[4], corpus, true)};
      if (p.size() == 6 && p[5] == "override" && m == "POST") {
        std::optional<Polarity> pol;
        if (r.body.contains("polarity") && !r.body["polarity"].is_null()) {
          const auto text = body_string(r.body, "polarity");
          if (text != "none") {
            pol = parse_polarity(text);
            if (!pol || *pol == Polarity::Unknown)
              throw Error(ErrorCode::InvalidValue, "override must be same, opposite or none");
          }
        }
        return mutation(workspace.set_edge_override(id, p[3], p[4], pol, actor(r), ev));
      }
    }
    if (p.size() == 3 && sub == "curations" && m == "POST") {
      if (!r.body.contains("actions") || !r.body["actions"].is_array())
        throw Error(ErrorCode::BadRequest, "body needs array 'actions'");
      std::vector<CurationAction> actions;
      for (const auto& a : r.body["actions"]) actions.push_back(curation_action_from_json(a));
      return mutation(workspace.curate(id, std::move(actions), actor(r), ev));
    }
    if (p.size() == 3 && sub == "materialize" && m == "POST") {
      std::optional<std::set<ConceptPair>> selected;
      if (r.body.contains("selected_pairs")) {
        selected.emplace();
        for (const auto& pair : r.body["selected_pairs"]) {
          if (pair.is_array() && pair.size() == 2)
            selected->insert({pair[0].get<std::string>(), pair[1].get<std::string>()});
          else
            selected->insert({pair.at("subject").get<std::string>(), pair.at("object").get<std::string>()});
        }
      }
      return mutation(workspace.materialize_search(id, result_from_body(r.body, corpus), selected, actor(r), ev));
    }
    if (p.size() == 3 && sub == "import" && m == "POST") {
      std::vector<std::string> sources;
      for (const auto& s : r.body.value("sources", json::array())) sources.push_back(s.get<std::string>());
      auto [res, report] = workspace.import_models(id, sources, actor(r), ev);
      auto out = mutation(res);
      out.body["merge_report"] = to_json(report);
      return out;
    }
    if (p.size() == 3 && sub == "duplicates" && m == "GET") {
      std::optional<double> threshold;
      if (auto t = r.param("threshold")) threshold = to_real(*t, "threshold");
      json list = json::array();
      for (const auto& match : workspace.find_near_duplicates(id, threshold)) list.push_back(to_json(match));
      return {200, {{"matches", std::move(list)}}};
    }
    if (p.size() == 3 && sub == "merge-nodes" && m == "POST")
      return mutation(workspace.apply_node_merge(id, body_string(r.body, "survivor"), body_string(r.body, "absorbed"),
                                                 actor(r), ev));
    if (p.size() == 3 && sub == "export" && m == "GET") return {200, workspace.export_model(id)};
    throw Error(ErrorCode::NotFound, "no such route");
  }

  json edge_json(const CagModel& model, const std::string& s, const std::string& o, const Corpus& corpus,
                 bool with_statements) const {
    const ModelEdge* e = model.find_edge(s, o);
    if (!e) throw Error(ErrorCode::UnknownEdge, "no edge " + s + " -> " + o, {{"subject", s}, {"object", o}});
    json j = to_json(e->aggregate);
    j["members"] = e->members;
    if (with_statements) {
      EngineContext ctx{corpus, config.belief_policy};
      json sts = json::array();
      for (const auto& id : e->members)
        if (auto st = effective_statement(model, ctx, id)) sts.push_back(to_json(*st));
      j["statements"] = std::move(sts);
    }
    return j;
  }
};

ApiService::ApiService(StatementStore& store, Workspace& workspace, Config config)
    : impl_(std::make_unique<Impl>(store, workspace, std::move(config))) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> headers;
    for (const auto& [k, v] : req.headers) headers.emplace(k, v);
    ApiResponse r = handle(req.method, req.target, req.body, headers);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
}

ApiService::~ApiService() { stop(); }

ApiResponse ApiService::handle(const std::string& method, const std::string& target, const std::string& body,
                               const std::map<std::string, std::string>& headers) {
  try {
    Request r = parse_request(method, target, body, headers);
    if (impl_->config.token && r.header("x-api-token") != impl_->config.token)
      throw Error(ErrorCode::Unauthorized, "missing or wrong X-Api-Token header");
    return impl_->dispatch(r);
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e)};
  } catch (const json::exception& e) {
    return {400, error_body(Error(ErrorCode::BadRequest, std::string("malformed request: ") + e.what()))};
  } catch (const std::exception& e) {
    return {500, error_body(Error(ErrorCode::IoError, "internal error"))};
  }
}

int ApiService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) bound = impl_->server.bind_to_any_port(host);
  else if (!impl_->server.bind_to_port(host, port)) bound = -1;
  if (bound <= 0) throw Error(ErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiService::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

void ApiService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cagkit
