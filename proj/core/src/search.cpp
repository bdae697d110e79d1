#include "cagkit/search.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>

namespace cagkit {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidQuery, msg); }

std::set<std::string> string_set(const json& j, const char* what) {
  if (!j.is_array()) invalid(std::string(what) + " must be an array of strings");
  std::set<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) invalid(std::string(what) + " must be an array of strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

Polarity polarity_value(const json& v) {
  std::optional<Polarity> p;
  if (v.is_number_integer()) p = polarity_from_wire(v.get<int>());
  if (v.is_string()) p = parse_polarity(v.get<std::string>());
  if (!p) invalid("unknown polarity " + v.dump());
  return *p;
}

Date date_value(const json& v) {
  if (!v.is_string()) invalid("dates must be YYYY-MM-DD strings");
  auto d = Date::parse(v.get<std::string>());
  if (!d) invalid("bad date " + v.dump());
  return *d;
}

template <typename F>
void each_prefix(const std::string& path, F&& f) {
  std::size_t pos = 0;
  while (true) {
    pos = path.find('/', pos);
    f(path.substr(0, pos));
    if (pos == std::string::npos) break;
    ++pos;
  }
}

}  // namespace

void FacetQuery::validate() const {
  if (doc.year_range && doc.year_range->first > doc.year_range->second)
    invalid("year_range start must not exceed end");
  if (rel.min_evidence && *rel.min_evidence < 1) invalid("min_evidence must be >= 1");
  if (rel.min_belief && !(std::isfinite(*rel.min_belief))) invalid("min_belief must be finite");
  if (factor.time_overlap && factor.time_overlap->second < factor.time_overlap->first)
    invalid("time_overlap start must not be after end");
  if (factor.region_prefix && !is_valid_region_path(*factor.region_prefix)) invalid("bad region_prefix");
  if (factor.bbox && (factor.bbox->min_lat > factor.bbox->max_lat || factor.bbox->min_lon > factor.bbox->max_lon))
    invalid("bbox minimum exceeds maximum");
}

bool FacetQuery::empty() const { return *this == FacetQuery{}; }

FacetQuery facet_query_from_json(const json& j) {
  FacetQuery q;
  if (j.is_null()) return q;
  if (!j.is_object()) invalid("query must be a JSON object");
  try {
    if (j.contains("doc")) {
      const json& d = j["doc"];
      if (d.contains("doc_ids")) q.doc.doc_ids = string_set(d["doc_ids"], "doc_ids");
      if (d.contains("sources")) q.doc.sources = string_set(d["sources"], "sources");
      if (d.contains("year_range")) {
        const json& r = d["year_range"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
          invalid("year_range must be [start, end]");
        q.doc.year_range = std::pair{r[0].get<int>(), r[1].get<int>()};
      }
    }
    if (j.contains("rel")) {
      const json& r = j["rel"];
      if (r.contains("polarities")) {
        if (!r["polarities"].is_array()) invalid("polarities must be an array");
        std::set<Polarity> ps;
        for (const auto& v : r["polarities"]) ps.insert(polarity_value(v));
        q.rel.polarities = ps;
      }
      if (r.contains("min_evidence")) {
        if (!r["min_evidence"].is_number_integer()) invalid("min_evidence must be an integer");
        const auto v = r["min_evidence"].get<long long>();
        if (v < 1) invalid("min_evidence must be >= 1");
        q.rel.min_evidence = static_cast<std::size_t>(v);
      }
      if (r.contains("min_belief")) {
        if (!r["min_belief"].is_number()) invalid("min_belief must be a number");
        q.rel.min_belief = r["min_belief"].get<double>();
      }
    }
    if (j.contains("factor")) {
      const json& f = j["factor"];
      if (f.contains("concepts")) q.factor.concepts = string_set(f["concepts"], "concepts");
      if (f.contains("exact_concepts")) q.factor.exact_concepts = f["exact_concepts"].get<bool>();
      if (f.contains("region_prefix")) {
        if (!f["region_prefix"].is_string()) invalid("region_prefix must be a string");
        q.factor.region_prefix = f["region_prefix"].get<std::string>();
      }
      if (f.contains("bbox")) {
        const json& b = f["bbox"];
        if (!b.is_array() || b.size() != 4) invalid("bbox must be [min_lat, min_lon, max_lat, max_lon]");
        q.factor.bbox = BoundingBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      }
      if (f.contains("time_overlap")) {
        const json& t = f["time_overlap"];
        if (!t.is_array() || t.size() != 2) invalid("time_overlap must be [start, end]");
        q.factor.time_overlap = std::pair{date_value(t[0]), date_value(t[1])};
      }
    }
  } catch (const json::exception& e) {
    invalid(std::string("malformed query: ") + e.what());
  }
  q.validate();
  return q;
}

json to_json(const FacetQuery& q) {
  json j = json::object();
  json d = json::object();
  if (q.doc.doc_ids) d["doc_ids"] = *q.doc.doc_ids;
  if (q.doc.sources) d["sources"] = *q.doc.sources;
  if (q.doc.year_range) d["year_range"] = {q.doc.year_range->first, q.doc.year_range->second};
  if (!d.empty()) j["doc"] = d;
  json r = json::object();
  if (q.rel.polarities) {
    json ps = json::array();
    for (auto p : *q.rel.polarities) ps.push_back(to_string(p));
    r["polarities"] = ps;
  }
  if (q.rel.min_evidence) r["min_evidence"] = *q.rel.min_evidence;
  if (q.rel.min_belief) r["min_belief"] = *q.rel.min_belief;
  if (!r.empty()) j["rel"] = r;
  json f = json::object();
  if (q.factor.concepts) f["concepts"] = *q.factor.concepts;
  if (q.factor.exact_concepts) f["exact_concepts"] = true;
  if (q.factor.region_prefix) f["region_prefix"] = *q.factor.region_prefix;
  if (q.factor.bbox)
    f["bbox"] = {q.factor.bbox->min_lat, q.factor.bbox->min_lon, q.factor.bbox->max_lat, q.factor.bbox->max_lon};
  if (q.factor.time_overlap)
    f["time_overlap"] = {q.factor.time_overlap->first.to_string(), q.factor.time_overlap->second.to_string()};
  if (!f.empty()) j["factor"] = f;
  return j;
}

FacetQuery select_facet(FacetQuery q, const std::string& facet, const std::string& value) {
  if (facet == kFacetPolarity) {
    auto p = parse_polarity(value);
    if (!p) throw Error(ErrorCode::InvalidArgument, "unknown polarity " + value);
    q.rel.polarities = std::set<Polarity>{*p};
  } else if (facet == kFacetSource) {
    q.doc.sources = std::set<std::string>{value};
  } else if (facet == kFacetYear) {
    int y = 0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), y);
    if (ec != std::errc() || end != value.data() + value.size())
      throw Error(ErrorCode::InvalidArgument, "year must be an integer: " + value);
    q.doc.year_range = std::pair{y, y};
  } else if (facet == kFacetRegion) {
    q.factor.region_prefix = value;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown facet " + facet);
  }
  return q;
}

bool matches(const CausalStatement& s, const FacetQuery& q) {
  if (s.discarded) return false;

  const auto& d = q.doc;
  if (d.doc_ids && std::none_of(s.evidence.begin(), s.evidence.end(),
                                [&](const Evidence& e) { return d.doc_ids->count(e.doc_id) > 0; }))
    return false;
  if (d.sources && std::none_of(s.evidence.begin(), s.evidence.end(), [&](const Evidence& e) {
        return e.source && d.sources->count(*e.source) > 0;
      }))
    return false;
  if (d.year_range && std::none_of(s.evidence.begin(), s.evidence.end(), [&](const Evidence& e) {
        return e.publication_date && e.publication_date->year >= d.year_range->first &&
               e.publication_date->year <= d.year_range->second;
      }))
    return false;

  const auto& r = q.rel;
  if (r.polarities && r.polarities->count(s.polarity) == 0) return false;
  if (r.min_evidence && s.evidence.size() < *r.min_evidence) return false;
  if (r.min_belief && s.belief < *r.min_belief) return false;

  const auto& f = q.factor;
  if (f.concepts) {
    const bool hit = std::any_of(f.concepts->begin(), f.concepts->end(), [&](const std::string& c) {
      if (f.exact_concepts) return s.subject == c || s.object == c;
      return concept_in_subtree(s.subject, c) || concept_in_subtree(s.object, c);
    });
    if (!hit) return false;
  }
  if (f.region_prefix && !(s.context.region_path && region_has_prefix(*s.context.region_path, *f.region_prefix)))
    return false;
  if (f.bbox) {
    if (!s.context.lat_lon) return false;
    const auto& ll = *s.context.lat_lon;
    if (ll.lat < f.bbox->min_lat || ll.lat > f.bbox->max_lat || ll.lon < f.bbox->min_lon ||
        ll.lon > f.bbox->max_lon)
      return false;
  }
  if (f.time_overlap) {
    auto iv = s.context.interval();
    if (!iv) return false;
    if (iv->second < f.time_overlap->first || f.time_overlap->second < iv->first) return false;
  }
  return true;
}

namespace {

using Postings = std::vector<StatementIndex>;

Postings union_of(std::vector<std::span<const StatementIndex>> lists) {
  Postings out;
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

constexpr int kMaxIndexedYearSpan = 400;

// Chooses the smallest posting list among indexed filters; nullopt means scan.
std::optional<Postings> plan_candidates(const Corpus& corpus, const FacetQuery& q) {
  std::optional<Postings> best;
  auto consider = [&](Postings p) {
    if (!best || p.size() < best->size()) best = std::move(p);
  };
  if (q.doc.doc_ids) {
    std::vector<std::span<const StatementIndex>> lists;
    for (const auto& d : *q.doc.doc_ids) lists.push_back(corpus.by_doc(d));
    consider(union_of(std::move(lists)));
  }
  if (q.doc.year_range && q.doc.year_range->second - q.doc.year_range->first <= kMaxIndexedYearSpan) {
    std::vector<std::span<const StatementIndex>> lists;
    for (int y = q.doc.year_range->first; y <= q.doc.year_range->second; ++y) lists.push_back(corpus.by_year(y));
    consider(union_of(std::move(lists)));
  }
  if (q.factor.concepts) {
    std::vector<std::span<const StatementIndex>> lists;
    for (const auto& c : *q.factor.concepts) {
      std::vector<std::string> expanded =
          q.factor.exact_concepts ? std::vector<std::string>{c} : corpus.ontology().subtree(c);
      for (const auto& e : expanded) {
        lists.push_back(corpus.by_subject(e));
        lists.push_back(corpus.by_object(e));
      }
    }
    consider(union_of(std::move(lists)));
  }
  if (q.factor.region_prefix) {
    auto p = corpus.by_region_prefix(*q.factor.region_prefix);
    consider(Postings(p.begin(), p.end()));
  }
  return best;
}

Postings evaluate(const Corpus& corpus, const FacetQuery& q) {
  Postings out;
  if (auto candidates = plan_candidates(corpus, q)) {
    for (StatementIndex i : *candidates)
      if (matches(corpus.at(i), q)) out.push_back(i);
  } else {
    for (StatementIndex i = 0; i < corpus.size(); ++i)
      if (matches(corpus.at(i), q)) out.push_back(i);
  }
  return out;
}

}  // namespace

FacetResult run_query(const Corpus& corpus, const FacetQuery& q) {
  q.validate();
  FacetResult result;
  for (StatementIndex i : evaluate(corpus, q)) result.statement_ids.push_back(corpus.at(i).id);
  std::sort(result.statement_ids.begin(), result.statement_ids.end());
  result.total = result.statement_ids.size();

  {
    FacetQuery without = q;
    without.rel.polarities.reset();
    auto& counts = result.facet_counts[kFacetPolarity];
    for (StatementIndex i : evaluate(corpus, without)) ++counts[std::string(to_string(corpus.at(i).polarity))];
  }
  {
    FacetQuery without = q;
    without.doc.sources.reset();
    auto& counts = result.facet_counts[kFacetSource];
    for (StatementIndex i : evaluate(corpus, without)) {
      std::set<std::string_view> seen;
      for (const auto& e : corpus.at(i).evidence)
        if (e.source) seen.insert(*e.source);
      for (auto s : seen) ++counts[std::string(s)];
    }
  }
  {
    FacetQuery without = q;
    without.doc.year_range.reset();
    auto& counts = result.facet_counts[kFacetYear];
    for (StatementIndex i : evaluate(corpus, without)) {
      std::set<int> seen;
      for (const auto& e : corpus.at(i).evidence)
        if (e.publication_date) seen.insert(e.publication_date->year);
      for (int y : seen) ++counts[std::to_string(y)];
    }
  }
  {
    FacetQuery without = q;
    without.factor.region_prefix.reset();
    auto& counts = result.facet_counts[kFacetRegion];
    for (StatementIndex i : evaluate(corpus, without)) {
      const auto& region = corpus.at(i).context.region_path;
      if (region) each_prefix(*region, [&](const std::string& p) { ++counts[p]; });
    }
  }
  return result;
}

json to_json(const FacetResult& r) {
  return {{"total", r.total}, {"statement_ids", r.statement_ids}, {"facet_counts", r.facet_counts}};
}

NestedProjection nested_graph_projection(const Corpus& corpus, const FacetResult& result, std::size_t edge_limit,
                                         BeliefPolicy policy) {
  std::map<std::string, std::size_t> counts;
  std::vector<CausalStatement> selected;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& id : result.statement_ids) {
    const CausalStatement* s = corpus.find(id);
    if (!s || s->discarded) continue;
    ++counts[s->subject];
    ++counts[s->object];
    pairs.emplace(s->subject, s->object);
    selected.push_back(*s);
  }

  NestedProjection out;
  std::map<std::string, Compartment> by_parent;
  for (const auto& [concept_id, n] : counts) {
    auto parent = concept_parent(concept_id);
    auto& comp = by_parent[parent];
    comp.parent = parent;
    comp.members.push_back({concept_id, n});
  }
  for (auto& [_, comp] : by_parent) out.compartments.push_back(std::move(comp));

  if (pairs.size() > edge_limit)
    out.edges = SuppressedEdges{pairs.size()};
  else
    out.edges = aggregate_graph(selected, policy);
  return out;
}

json to_json(const NestedProjection& p) {
  json comps = json::array();
  for (const auto& c : p.compartments) {
    json members = json::array();
    for (const auto& m : c.members) members.push_back({{"concept", m.concept_id}, {"statements", m.statements}});
    comps.push_back({{"parent", c.parent}, {"members", std::move(members)}});
  }
  json j = {{"compartments", std::move(comps)}};
  if (const auto* s = std::get_if<SuppressedEdges>(&p.edges)) {
    j["edges"] = nullptr;
    j["suppressed"] = {{"relationships", s->relationship_count}};
  } else {
    json edges = json::array();
    for (const auto& e : std::get<std::vector<AggregatedEdge>>(p.edges)) edges.push_back(to_json(e));
    j["edges"] = std::move(edges);
    j["suppressed"] = nullptr;
  }
  return j;
}

}  // namespace cagkit
