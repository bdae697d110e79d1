#include "cagkit/statement_json.hpp"

#include <cmath>
#include <cstdio>

namespace cagkit {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string derive_statement_id(const CausalStatement& s) {
  std::string key = s.subject;
  key.push_back('\x1f');
  key += s.object;
  key.push_back('\x1f');
  key += std::to_string(polarity_to_wire(s.polarity));
  key.push_back('\x1f');
  if (!s.evidence.empty()) {
    key += s.evidence.front().doc_id;
    key.push_back('\x1f');
    key += s.evidence.front().text;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "s-%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

namespace {

class Collector {
 public:
  void add(ErrorCode code, std::string field, std::string message) {
    errors.push_back({code, std::move(field), std::move(message)});
  }
  std::vector<ValidationIssue> errors;
};

const json* member(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::optional<std::string> required_string(const json& obj, const char* key, const std::string& field,
                                           Collector& errs) {
  const json* v = member(obj, key);
  if (!v) {
    errs.add(ErrorCode::MissingField, field, "missing required field");
    return std::nullopt;
  }
  if (!v->is_string()) {
    errs.add(ErrorCode::InvalidValue, field, "expected a string");
    return std::nullopt;
  }
  return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& field,
                                           Collector& errs) {
  const json* v = member(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) {
    errs.add(ErrorCode::InvalidValue, field, "expected a string");
    return std::nullopt;
  }
  return v->get<std::string>();
}

std::optional<Date> optional_date(const json& obj, const char* key, const std::string& field,
                                  Collector& errs) {
  auto text = optional_string(obj, key, field, errs);
  if (!text) return std::nullopt;
  auto d = Date::parse(*text);
  if (!d) errs.add(ErrorCode::InvalidValue, field, "expected a YYYY-MM-DD calendar date");
  return d;
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& field,
                                      Collector& errs) {
  const json* v = member(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) {
    errs.add(ErrorCode::InvalidValue, field, "expected a number");
    return std::nullopt;
  }
  return v->get<double>();
}

void parse_concept_ref(const json& raw, const char* key, std::string& concept_id, std::string& text,
                       Collector& errs) {
  const std::string field = key;
  const json* ref = member(raw, key);
  if (!ref) {
    errs.add(ErrorCode::MissingField, field, "missing required field");
    return;
  }
  if (!ref->is_object()) {
    errs.add(ErrorCode::InvalidValue, field, "expected an object");
    return;
  }
  if (auto c = required_string(*ref, "concept", field + ".concept", errs)) {
    if (!is_valid_concept_id(*c))
      errs.add(ErrorCode::InvalidValue, field + ".concept",
               "concept id must be a lowercase slash-separated path without whitespace");
    concept_id = *c;
  }
  if (auto t = optional_string(*ref, "text", field + ".text", errs)) text = *t;
}

}  // namespace

StatementValidation validate_statement(const json& raw) {
  Collector errs;
  CausalStatement s;

  if (!raw.is_object()) {
    errs.add(ErrorCode::MalformedLine, "", "record must be a JSON object");
    return {std::nullopt, std::move(errs.errors)};
  }

  if (auto id = optional_string(raw, "id", "id", errs)) {
    if (id->empty())
      errs.add(ErrorCode::InvalidValue, "id", "id must be non-empty when present");
    s.id = *id;
  }

  parse_concept_ref(raw, "subj", s.subject, s.subject_text, errs);
  parse_concept_ref(raw, "obj", s.object, s.object_text, errs);
  if (!s.subject.empty() && s.subject == s.object)
    errs.add(ErrorCode::SelfLoop, "obj.concept", "subject and object must differ");

  if (const json* p = member(raw, "polarity")) {
    std::optional<Polarity> pol;
    if (p->is_number_integer()) pol = polarity_from_wire(p->get<int>());
    if (pol)
      s.polarity = *pol;
    else
      errs.add(ErrorCode::InvalidValue, "polarity", "polarity must be 1, -1 or 0");
  } else {
    errs.add(ErrorCode::MissingField, "polarity", "missing required field");
  }

  if (const json* b = member(raw, "belief")) {
    if (!b->is_number()) {
      errs.add(ErrorCode::InvalidValue, "belief", "expected a number");
    } else {
      s.belief = b->get<double>();
      if (!std::isfinite(s.belief) || s.belief < 0.0 || s.belief > 1.0)
        errs.add(ErrorCode::BeliefOutOfRange, "belief", "belief must lie in [0, 1]");
    }
  } else {
    errs.add(ErrorCode::MissingField, "belief", "missing required field");
  }

  if (const json* ev = member(raw, "evidence")) {
    if (!ev->is_array()) {
      errs.add(ErrorCode::InvalidValue, "evidence", "expected an array");
    } else if (ev->empty()) {
      errs.add(ErrorCode::EmptyEvidence, "evidence", "at least one evidence item is required");
    } else {
      for (std::size_t i = 0; i < ev->size(); ++i) {
        const json& item = (*ev)[i];
        const std::string field = "evidence[" + std::to_string(i) + "]";
        if (!item.is_object()) {
          errs.add(ErrorCode::InvalidValue, field, "expected an object");
          continue;
        }
        Evidence e;
        if (auto d = required_string(item, "doc_id", field + ".doc_id", errs)) {
          if (d->empty()) errs.add(ErrorCode::MissingField, field + ".doc_id", "doc_id is empty");
          e.doc_id = *d;
        }
        if (auto t = required_string(item, "text", field + ".text", errs)) {
          if (t->empty()) errs.add(ErrorCode::MissingField, field + ".text", "text is empty");
          e.text = *t;
        }
        e.source = optional_string(item, "source", field + ".source", errs);
        e.publication_date = optional_date(item, "date", field + ".date", errs);
        if (const json* off = member(item, "offset")) {
          if (off->is_array() && off->size() == 2 && (*off)[0].is_number_unsigned() &&
              (*off)[1].is_number_unsigned() &&
              (*off)[0].get<std::size_t>() <= (*off)[1].get<std::size_t>()) {
            e.location_in_doc = std::pair{(*off)[0].get<std::size_t>(), (*off)[1].get<std::size_t>()};
          } else {
            errs.add(ErrorCode::InvalidValue, field + ".offset", "offset must be [start, end] with start <= end");
          }
        }
        s.evidence.push_back(std::move(e));
      }
    }
  } else {
    errs.add(ErrorCode::EmptyEvidence, "evidence", "at least one evidence item is required");
  }

  if (const json* ctx = member(raw, "context")) {
    if (!ctx->is_object()) {
      errs.add(ErrorCode::InvalidValue, "context", "expected an object");
    } else {
      if (auto region = optional_string(*ctx, "region", "context.region", errs)) {
        if (!is_valid_region_path(*region))
          errs.add(ErrorCode::BadRegionPath, "context.region",
                   "region must be a slash-separated path of non-empty segments");
        s.context.region_path = *region;
      }
      auto lat = optional_number(*ctx, "lat", "context.lat", errs);
      auto lon = optional_number(*ctx, "lon", "context.lon", errs);
      if (lat.has_value() != lon.has_value()) {
        errs.add(ErrorCode::MissingField, lat ? "context.lon" : "context.lat",
                 "lat and lon must be given together");
      } else if (lat && lon) {
        if (!(*lat >= -90.0 && *lat <= 90.0))
          errs.add(ErrorCode::InvalidValue, "context.lat", "lat must lie in [-90, 90]");
        if (!(*lon >= -180.0 && *lon <= 180.0))
          errs.add(ErrorCode::InvalidValue, "context.lon", "lon must lie in [-180, 180]");
        s.context.lat_lon = LatLon{*lat, *lon};
      }
      s.context.start = optional_date(*ctx, "start", "context.start", errs);
      s.context.end = optional_date(*ctx, "end", "context.end", errs);
      if (s.context.start && s.context.end && *s.context.end < *s.context.start)
        errs.add(ErrorCode::BadDateOrder, "context.end", "start must not be after end");
    }
  }

  if (const json* d = member(raw, "discarded")) {
    if (d->is_boolean())
      s.discarded = d->get<bool>();
    else
      errs.add(ErrorCode::InvalidValue, "discarded", "expected a boolean");
  }

  if (!errs.errors.empty()) return {std::nullopt, std::move(errs.errors)};
  if (s.id.empty()) s.id = derive_statement_id(s);
  return {std::move(s), {}};
}

StatementValidation validate_statement_line(std::string_view line) {
  json parsed = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded())
    return {std::nullopt, {{ErrorCode::MalformedLine, "", "line is not valid JSON"}}};
  return validate_statement(parsed);
}

json to_json(const CausalStatement& s) {
  json j;
  j["id"] = s.id;
  j["subj"] = {{"concept", s.subject}, {"text", s.subject_text}};
  j["obj"] = {{"concept", s.object}, {"text", s.object_text}};
  j["polarity"] = polarity_to_wire(s.polarity);
  j["belief"] = s.belief;
  json ev = json::array();
  for (const auto& e : s.evidence) {
    json item = {{"doc_id", e.doc_id}, {"text", e.text}};
    if (e.source) item["source"] = *e.source;
    if (e.publication_date) item["date"] = e.publication_date->to_string();
    if (e.location_in_doc) item["offset"] = {e.location_in_doc->first, e.location_in_doc->second};
    ev.push_back(std::move(item));
  }
  j["evidence"] = std::move(ev);
  json ctx = json::object();
  if (s.context.region_path) ctx["region"] = *s.context.region_path;
  if (s.context.lat_lon) {
    ctx["lat"] = s.context.lat_lon->lat;
    ctx["lon"] = s.context.lat_lon->lon;
  }
  if (s.context.start) ctx["start"] = s.context.start->to_string();
  if (s.context.end) ctx["end"] = s.context.end->to_string();
  j["context"] = std::move(ctx);
  if (s.discarded) j["discarded"] = true;
  return j;
}

}  // namespace cagkit
