#include "cli.hpp"

#include "cagkit/config.hpp"
#include "cagkit/embeddings.hpp"
#include "cagkit/layout.hpp"
#include "cagkit/search.hpp"
#include "cagkit/service.hpp"
#include "cagkit/statement_json.hpp"
#include "cagkit/store.hpp"
#include "cagkit/suggest.hpp"
#include "cagkit/svg.hpp"
#include "cagkit/workspace.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <sstream>

namespace cagkit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::IoError:
    case ErrorCode::StoreUnavailable:
    case ErrorCode::PortInUse: return kExitIo;
    default: return kExitValidation;
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
}

json parse_json_file(const fs::path& p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidValue, p.string() + " is not valid JSON: " + e.what());
  }
}

std::string resolve(const Corpus& corpus, const std::string& q) {
  if (corpus.ontology().contains(q)) return q;
  return corpus.ontology().resolve(q).value_or(q);
}

struct Globals {
  std::string store;
  std::string config_file;
  bool json = false;
};

struct Session {
  Config config;
  std::unique_ptr<StatementStore> store;
  std::unique_ptr<Workspace> workspace;
};

Session open_session(const Globals& g, bool need_workspace = true) {
  Session s;
  if (!g.config_file.empty()) s.config = load_config(g.config_file);
  if (!g.store.empty()) s.config.store_dir = g.store;
  if (s.config.store_dir.empty()) throw Error(ErrorCode::InvalidArgument, "--store is required");
  try {
    s.store = std::make_unique<StatementStore>(s.config.store_dir);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::StoreUnavailable, std::string("cannot open store: ") + e.what());
  }
  if (need_workspace) {
    s.workspace = std::make_unique<Workspace>(*s.store, s.config.store_dir / "models", s.config.workspace());
    fs::path emb = s.config.embeddings.value_or(s.config.store_dir / "embeddings.json");
    if (fs::exists(emb)) s.workspace->set_embeddings(std::make_shared<EmbeddingTable>(EmbeddingTable::load(emb)));
  }
  return s;
}

std::string statement_line(const CausalStatement& s) {
  std::ostringstream o;
  o << s.id << '\t' << s.subject << " -> " << s.object << '\t' << to_string(s.polarity) << '\t' << s.belief << '\t'
    << s.evidence.size() << " evidence";
  return o.str();
}

ApiService* g_serving = nullptr;

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal analysis graph toolkit", "cagkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store, "Store directory");
  app.add_option("--config", g.config_file, "Config file (key = value)");
  app.add_flag("--json", g.json, "Machine-readable output");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate and load a JSONL statement corpus");
  std::string ingest_file, ingest_mode = "append", ontology_file;
  ingest->add_option("file", ingest_file, "JSONL corpus")->required();
  ingest->add_option("--mode", ingest_mode, "append or replace")->check(CLI::IsMember({"append", "replace"}));
  ingest->add_option("--ontology", ontology_file, "Ontology file (one concept id per line)");

  // query
  auto* query = app.add_subcommand("query", "Run a faceted query");
  std::vector<std::string> q_docs, q_sources, q_pols, q_concepts;
  std::vector<int> q_years;
  std::optional<std::size_t> q_min_ev;
  std::optional<double> q_min_belief;
  std::string q_region, q_from, q_to, q_file;
  bool q_exact = false, q_nested = false;
  std::size_t q_limit = 100;
  query->add_option("--doc", q_docs, "Document id");
  query->add_option("--source", q_sources, "Evidence source");
  query->add_option("--years", q_years, "Publication year range FROM TO")->expected(2);
  query->add_option("--polarity", q_pols, "same, opposite or unknown");
  query->add_option("--min-evidence", q_min_ev, "Minimum evidence count");
  query->add_option("--min-belief", q_min_belief, "Minimum belief");
  query->add_option("--concept", q_concepts, "Concept id or name (subject or object)");
  query->add_flag("--exact", q_exact, "Do not expand concepts to their ontology subtree");
  query->add_option("--region", q_region, "Region path prefix");
  query->add_option("--from", q_from, "Time window start (YYYY-MM-DD)");
  query->add_option("--to", q_to, "Time window end (YYYY-MM-DD)");
  query->add_option("--query-file", q_file, "FacetQuery JSON file");
  query->add_flag("--nested", q_nested, "Include the nested graph projection");
  query->add_option("--limit", q_limit, "Statements to print");

  // suggest
  auto* suggest = app.add_subcommand("suggest", "Concept or relationship suggestions");
  std::string s_text;
  bool s_rel = false;
  std::size_t s_k = 0;
  suggest->add_option("text", s_text, "Query text, or a concept with --relationships")->required();
  suggest->add_flag("--relationships", s_rel, "Suggest relationships of a concept");
  suggest->add_option("-k", s_k, "Result count");

  // paths
  auto* paths = app.add_subcommand("paths", "Indirect paths between two concepts");
  std::string p_source, p_target;
  std::optional<std::size_t> p_hops;
  std::size_t p_k = 5;
  paths->add_option("--source", p_source)->required();
  paths->add_option("--target", p_target)->required();
  paths->add_option("--max-hops", p_hops);
  paths->add_option("-k", p_k);

  // cag
  auto* cag = app.add_subcommand("cag", "Model import and export");
  cag->require_subcommand(1);
  auto* cag_export = cag->add_subcommand("export", "Write a model as JSON");
  std::string c_id, c_out, c_file, c_name;
  cag_export->add_option("id", c_id)->required();
  cag_export->add_option("-o,--output", c_out, "Output file (stdout if absent)");
  auto* cag_import = cag->add_subcommand("import", "Create a model from an export file");
  cag_import->add_option("file", c_file)->required();
  auto* cag_list = cag->add_subcommand("list", "List models");
  auto* cag_create = cag->add_subcommand("create", "Create an empty model");
  cag_create->add_option("name", c_name)->required();

  // layout
  auto* layout = app.add_subcommand("layout", "Layout rendering");
  layout->require_subcommand(1);
  auto* layout_svg = layout->add_subcommand("svg", "Render a model as SVG 1.1");
  std::string l_model, l_out;
  layout_svg->add_option("--model", l_model)->required();
  layout_svg->add_option("-o,--output", l_out)->required();

  // embed
  auto* embed = app.add_subcommand("embed", "Concept embeddings");
  embed->require_subcommand(1);
  auto* embed_build = embed->add_subcommand("build", "Embed and cluster ontology concepts");
  std::string e_vectors, e_out;
  std::optional<std::size_t> e_min_cluster;
  embed_build->add_option("--vectors", e_vectors, "Word vector text file")->required();
  embed_build->add_option("-o,--output", e_out, "Output table (default <store>/embeddings.json)");
  embed_build->add_option("--min-cluster-size", e_min_cluster);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::optional<int> v_port;
  std::string v_host, v_token;
  serve->add_option("--port", v_port);
  serve->add_option("--host", v_host);
  serve->add_option("--token", v_token, "Require this X-Api-Token header");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  auto emit = [&](const json& j, const std::string& text) {
    if (g.json) out << j.dump(2) << '\n';
    else out << text;
  };

  try {
    if (*ingest) {
      Session s = open_session(g, false);
      if (!ontology_file.empty()) s.store->load_ontology(ontology_file);
      const auto report = s.store->ingest(ingest_file, ingest_mode == "replace" ? IngestMode::Replace : IngestMode::Append);
      std::ostringstream text;
      text << "accepted " << report.accepted << ", rejected " << report.rejected << '\n';
      for (const auto& issue : report.errors)
        for (const auto& e : issue.errors)
          text << "line " << issue.line << ": " << to_string(e.code) << " " << e.field << ": " << e.message << '\n';
      emit(to_json(report), text.str());
      return report.rejected == 0 ? kExitOk : kExitValidation;
    }
    if (*query) {
      Session s = open_session(g, false);
      auto corpus = s.store->snapshot();
      FacetQuery q;
      if (!q_file.empty()) q = facet_query_from_json(parse_json_file(q_file));
      if (!q_docs.empty()) q.doc.doc_ids = std::set<std::string>(q_docs.begin(), q_docs.end());
      if (!q_sources.empty()) q.doc.sources = std::set<std::string>(q_sources.begin(), q_sources.end());
      if (q_years.size() == 2) q.doc.year_range = std::pair{q_years[0], q_years[1]};
      if (!q_pols.empty()) {
        q.rel.polarities.emplace();
        for (const auto& p : q_pols) {
          auto pol = parse_polarity(p);
          if (!pol) throw Error(ErrorCode::InvalidQuery, "unknown polarity '" + p + "'");
          q.rel.polarities->insert(*pol);
        }
      }
      if (q_min_ev) q.rel.min_evidence = *q_min_ev;
      if (q_min_belief) q.rel.min_belief = *q_min_belief;
      if (!q_concepts.empty()) {
        q.factor.concepts.emplace();
        for (const auto& c : q_concepts) q.factor.concepts->insert(resolve(*corpus, c));
      }
      q.factor.exact_concepts = q.factor.exact_concepts || q_exact;
      if (!q_region.empty()) q.factor.region_prefix = q_region;
      if (!q_from.empty() || !q_to.empty()) {
        auto a = Date::parse(q_from.empty() ? q_to : q_from);
        auto b = Date::parse(q_to.empty() ? q_from : q_to);
        if (!a || !b) throw Error(ErrorCode::InvalidQuery, "dates must be YYYY-MM-DD");
        q.factor.time_overlap = std::pair{*a, *b};
      }
      const FacetResult r = run_query(*corpus, q);
      json j = to_json(r);
      json sts = json::array();
      std::ostringstream text;
      text << r.total << " statements\n";
      for (std::size_t i = 0; i < r.statement_ids.size() && i < q_limit; ++i) {
        const auto& st = *corpus->find(r.statement_ids[i]);
        sts.push_back(to_json(st));
        text << statement_line(st) << '\n';
      }
      j["statements"] = std::move(sts);
      if (q_nested) j["projection"] = to_json(nested_graph_projection(*corpus, r, s.config.edge_limit, s.config.belief_policy));
      emit(j, text.str());
      return kExitOk;
    }
    if (*suggest) {
      Session s = open_session(g, false);
      auto corpus = s.store->snapshot();
      std::ostringstream text;
      if (s_rel) {
        const std::string node = resolve(*corpus, s_text);
        auto r = suggest_relationships(*corpus, node, s_k ? s_k : 5, {}, s.config.belief_policy);
        for (const auto& x : r.incoming)
          text << "in\t" << x.subject << " -> " << x.object << '\t' << x.support << '\t'
               << to_string(x.aggregate_polarity) << '\n';
        for (const auto& x : r.outgoing)
          text << "out\t" << x.subject << " -> " << x.object << '\t' << x.support << '\t'
               << to_string(x.aggregate_polarity) << '\n';
        emit(to_json(r), text.str());
      } else {
        json list = json::array();
        for (const auto& c : suggest_concepts(*corpus, s_text, s_k ? s_k : 10)) {
          list.push_back(to_json(c));
          text << c.concept_id << '\t' << c.display_name << '\t' << c.statements << '\n';
        }
        emit(list, text.str());
      }
      return kExitOk;
    }
    if (*paths) {
      Session s = open_session(g);
      auto corpus = s.store->snapshot();
      auto emb = s.workspace->embeddings();
      const auto found = indirect_paths(*corpus, resolve(*corpus, p_source), resolve(*corpus, p_target),
                                        p_hops.value_or(s.config.max_hops), p_k, emb.get());
      json list = json::array();
      std::ostringstream text;
      for (const auto& p : found) {
        list.push_back(to_json(p, emb.get()));
        text << '[';
        for (std::size_t i = 0; i < p.concepts.size(); ++i) text << (i ? ", " : "") << concept_leaf(p.concepts[i]);
        text << "]  support";
        for (auto sup : p.hop_support) text << ' ' << sup;
        text << '\n';
      }
      emit(list, text.str());
      return kExitOk;
    }
    if (*cag) {
      Session s = open_session(g);
      if (*cag_export) {
        const std::string doc = s.workspace->export_model(c_id).dump(2) + "\n";
        if (c_out.empty()) out << doc;
        else write_file(c_out, doc);
        return kExitOk;
      }
      if (*cag_import) {
        auto m = s.workspace->import_file(parse_json_file(c_file), "cli");
        emit({{"id", m.id}, {"version", m.version}, {"nodes", m.nodes.size()}, {"edges", m.edges.size()}},
             m.id + "\n");
        return kExitOk;
      }
      if (*cag_create) {
        auto m = s.workspace->create(c_name);
        emit({{"id", m.id}, {"version", m.version}}, m.id + "\n");
        return kExitOk;
      }
      if (*cag_list) {
        json list = json::array();
        std::ostringstream text;
        for (const auto& m : s.workspace->list()) {
          list.push_back({{"id", m.id}, {"name", m.name}, {"version", m.version}});
          text << m.id << '\t' << m.name << "\tv" << m.version << '\n';
        }
        emit(list, text.str());
        return kExitOk;
      }
    }
    if (*layout_svg) {
      Session s = open_session(g);
      auto corpus = s.store->snapshot();
      const CagModel m = s.workspace->get(l_model);
      write_file(l_out, cag_to_svg(m, corpus->ontology(), s.config.layout(m.policy)));
      emit({{"output", l_out}}, l_out + "\n");
      return kExitOk;
    }
    if (*embed_build) {
      Session s = open_session(g, false);
      auto corpus = s.store->snapshot();
      HdbscanParams params = s.config.hdbscan;
      if (e_min_cluster) params.min_cluster_size = *e_min_cluster;
      const auto table = build_embeddings_and_clusters(fs::path(e_vectors), corpus->ontology(), params);
      const fs::path target = e_out.empty() ? s.config.store_dir / "embeddings.json" : fs::path(e_out);
      table.save(target);
      std::set<int> clusters;
      std::size_t noise = 0;
      for (const auto& [_, row] : table.rows()) {
        if (row.cluster_id == kNoiseCluster) ++noise;
        else clusters.insert(row.cluster_id);
      }
      emit({{"output", target.string()}, {"concepts", table.size()}, {"clusters", clusters.size()}, {"noise", noise}},
           "embedded " + std::to_string(table.size()) + " concepts into " + std::to_string(clusters.size()) +
               " clusters\n");
      return kExitOk;
    }
    if (*serve) {
      Session s = open_session(g);
      if (v_port) s.config.port = static_cast<std::uint16_t>(*v_port);
      if (!v_host.empty()) s.config.host = v_host;
      if (!v_token.empty()) s.config.token = v_token;
      ApiService service(*s.store, *s.workspace, s.config);
      g_serving = &service;
      std::signal(SIGINT, [](int) {
        if (g_serving) g_serving->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (g_serving) g_serving->stop();
      });
      err << "listening on " << s.config.host << ':' << s.config.port << '\n';
      service.run(s.config.host, s.config.port);
      g_serving = nullptr;
      return kExitOk;
    }
  } catch (const Error& e) {
    if (g.json) err << error_body(e).dump() << '\n';
    else err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace cagkit
