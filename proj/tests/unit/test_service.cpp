#include "cagkit/service.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>
#include <httplib.h>

using namespace cagkit;
using nlohmann::json;
namespace t = cagkit::testing;

namespace {

const std::string F = "wm/concept/food/";

std::string enc(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      static const char* hex = "0123456789ABCDEF";
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

struct Fixture {
  StatementStore store;
  Workspace ws{store};
  Config config;
  std::unique_ptr<ApiService> api;

  explicit Fixture(std::optional<std::string> token = std::nullopt) {
    store.load_ontology(t::fixture("ontology.tsv"));
    store.ingest(t::fixture("food_security.jsonl"), IngestMode::Replace);
    config.token = std::move(token);
    api = std::make_unique<ApiService>(store, ws, config);
  }

  ApiResponse call(const std::string& method, const std::string& target, const json& body = nullptr,
                   std::map<std::string, std::string> headers = {}) {
    return api->handle(method, target, body.is_null() ? "" : body.dump(), headers);
  }
};

}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::VersionConflict) == 409);
  CHECK(http_status(ErrorCode::WouldCreateCycle) == 409);
  CHECK(http_status(ErrorCode::UnknownModel) == 404);
  CHECK(http_status(ErrorCode::Unauthorized) == 401);
  CHECK(http_status(ErrorCode::InvalidQuery) == 400);
  CHECK(http_status(ErrorCode::PortInUse) == 503);
  const auto body = error_body(Error(ErrorCode::UnknownEdge, "gone", {{"subject", "a"}}));
  CHECK(body["error"]["code"] == "UnknownEdge");
  CHECK(body["error"]["details"]["subject"] == "a");
}

TEST_CASE("token check") {
  Fixture f("k");
  CHECK(f.call("GET", "/health").status == 401);
  CHECK(f.call("GET", "/health", nullptr, {{"X-Api-Token", "nope"}}).status == 401);
  const auto ok = f.call("GET", "/health", nullptr, {{"x-api-token", "k"}});
  CHECK(ok.status == 200);
  CHECK(ok.body["statements"] == 42);
}

TEST_CASE("search, suggestions and paths") {
  Fixture f;
  auto r = f.call("POST", "/search?limit=5",
                  {{"factor", {{"concepts", {F + "food_access"}}}}});
  REQUIRE(r.status == 200);
  CHECK(r.body["total"] == 11);
  CHECK(r.body["statement_ids"].size() == 5);
  CHECK(r.body["facet_counts"]["polarity"]["opposite"] == 6);

  r = f.call("POST", "/search?view=nested&include=statements&limit=2",
             {{"factor", {{"concepts", {"wm/concept/environment/drought"}}}}});
  CHECK(r.body["statements"].size() == 2);
  CHECK(r.body.contains("projection"));
  CHECK(r.body["layout"].contains("nodes"));

  CHECK(f.call("POST", "/search", {{"rel", {{"min_evidence", 0}}}}).status == 400);
  CHECK(f.call("POST", "/search", "not json").status == 400);
  CHECK(f.api->handle("POST", "/search", "{bad", {}).status == 400);

  r = f.call("GET", "/concepts/suggest?q=drou");
  REQUIRE(r.body["suggestions"].size() >= 1);
  CHECK(r.body["suggestions"][0]["concept"] == "wm/concept/environment/drought");

  r = f.call("GET", "/concepts/" + enc("Food Access") + "/relationships/suggest?k=1");
  CHECK(r.status == 200);
  CHECK(r.body["concept"] == F + "food_access");

  r = f.call("GET", "/paths?source=" + enc("wm/concept/health/disease") + "&target=" +
                        enc("wm/concept/agriculture/farming") + "&max_hops=2");
  REQUIRE(r.status == 200);
  CHECK(r.body["paths"].size() == 1);
  r = f.call("GET", "/paths?source=" + enc("wm/concept/agriculture/farming") + "&target=" +
                        enc("wm/concept/health/disease"));
  CHECK(r.status == 404);
  CHECK(r.body["error"]["code"] == "NoPathFound");
  CHECK(f.call("GET", "/nowhere").status == 404);
}

TEST_CASE("model lifecycle over the handler") {
  Fixture f;
  auto r = f.call("POST", "/cags", {{"name", "m"}, {"policy", "enforced"}});
  REQUIRE(r.status == 201);
  const std::string id = r.body["id"];
  const std::string base = "/cags/" + id;

  r = f.call("POST", base + "/edges", {{"subject", "Food Price"}, {"object", F + "food_access"}, {"expected_version", 1}},
             {{"X-Actor", "ana"}});
  REQUIRE(r.status == 200);
  CHECK(r.body["version"] == 2);
  CHECK(r.body["changed"] == true);
  CHECK(r.body["edge"]["polarity"] == "opposite");
  CHECK(r.body["model"]["audit"][0]["actor"] == "ana");

  r = f.call("POST", base + "/edges", {{"subject", F + "food_access"}, {"object", F + "food_security"},
                                       {"expected_version", 1}});
  CHECK(r.status == 409);
  CHECK(r.body["error"]["details"]["actual"] == 2);

  r = f.call("POST", base + "/edges", {{"subject", F + "food_access"}, {"object", F + "food_price"}});
  CHECK(r.status == 409);
  CHECK(r.body["error"]["code"] == "WouldCreateCycle");

  const std::string edge = base + "/edges/" + enc(F + "food_price") + "/" + enc(F + "food_access");
  r = f.call("POST", edge + "/override", {{"polarity", "same"}});
  CHECK(r.body["model"]["edges"][0]["override"] == "same");
  r = f.call("POST", edge + "/override", {{"polarity", "none"}});
  CHECK_FALSE(r.body["model"]["edges"][0].contains("override"));
  CHECK(f.call("POST", edge + "/override", {{"polarity", "unknown"}}).status == 400);

  r = f.call("GET", edge);
  CHECK(r.body["statements"].size() == 4);

  r = f.call("GET", base);
  CHECK(r.body["layout"]["nodes"].size() == 2);

  r = f.call("POST", base + "/curations",
             {{"actions", {{{"kind", "DiscardStatement"}, {"payload", {{"statement_ids", {"fp-fa-1"}}}}}}}});
  REQUIRE(r.status == 200);
  CHECK(r.body["model"]["edges"][0]["aggregate"]["evidence_count"] == 3);

  r = f.call("POST", base + "/materialize", {{"query", {{"factor", {{"concepts", {F + "food_aid"}}}}}}});
  CHECK(r.body["model"]["edges"].size() == 2);

  r = f.call("GET", "/cags");
  CHECK(r.body["total"] == 1);
  CHECK(r.body["models"][0]["edges"] == 2);

  r = f.call("GET", base + "/export");
  const json exported = r.body;
  r = f.call("POST", "/cags/import-file", exported);
  REQUIRE(r.status == 201);
  CHECK(r.body["edges"].size() == 2);

  r = f.call("DELETE", edge);
  CHECK(r.body["model"]["edges"].size() == 1);
  CHECK(f.call("DELETE", edge).status == 404);
  CHECK(f.call("DELETE", base).status == 200);
  CHECK(f.call("GET", base).status == 404);
}

TEST_CASE("serving over a socket") {
  Fixture f;
  const int port = f.api->start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["statements"] == 42);
  f.api->stop();
}

TEST_CASE("config files") {
  const auto c = parse_config(R"(# comment
store = "/tmp/s"
port = 9000
token = abc
belief_policy = mean
acyclicity = relaxed
edge_limit = 12
layout.layer_gap = 150
layout.spacing_threshold = 10
)");
  CHECK(c.store_dir == "/tmp/s");
  CHECK(c.port == 9000);
  CHECK(c.token == std::optional<std::string>("abc"));
  CHECK(c.belief_policy == BeliefPolicy::Mean);
  CHECK(c.acyclicity == AcyclicityPolicy::Relaxed);
  CHECK(c.edge_limit == 12);
  CHECK(c.spacing.base.layer_gap == 150);
  CHECK(c.spacing.threshold == 10);
  CHECK(c.workspace().default_policy == AcyclicityPolicy::Relaxed);
  CHECK_THROWS_AS(parse_config("colour = blue"), Error);
  CHECK_THROWS_AS(parse_config("port = many"), Error);
  CHECK_THROWS_AS(parse_config("belief_policy = median"), Error);
}
