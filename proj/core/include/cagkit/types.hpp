#pragma once

#include "cagkit/date.hpp"
#include "cagkit/error.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cagkit {

/// Direction of influence of a single statement. Unknown only comes from
/// extraction; curation may only choose Same or Opposite.
enum class Polarity { Same, Opposite, Unknown };

/// Roll-up of an edge's statements.
enum class AggregatePolarity { Same, Opposite, Ambiguous, NoEvidence };

/// Wire encoding: 1 -> Same, -1 -> Opposite, 0 -> Unknown.
int polarity_to_wire(Polarity p);
std::optional<Polarity> polarity_from_wire(int value);

std::string_view to_string(Polarity p);
std::string_view to_string(AggregatePolarity p);
/// Accepts "same"/"opposite"/"unknown" (any case) and "1"/"-1"/"0".
std::optional<Polarity> parse_polarity(std::string_view text);
std::optional<AggregatePolarity> parse_aggregate_polarity(std::string_view text);

struct Concept {
  std::string id;            // e.g. "wm/concept/agriculture/crop_production"
  std::string display_name;  // e.g. "Crop Production"
  int depth = 0;             // number of path segments

  bool operator==(const Concept&) const = default;
};

bool is_valid_concept_id(std::string_view id);
/// Parent path (id minus last segment); empty for top-level concepts.
std::string concept_parent(std::string_view id);
std::string_view concept_leaf(std::string_view id);
int concept_depth(std::string_view id);
/// Last segment, underscores to spaces, title case: "food_price" -> "Food Price".
std::string derive_display_name(std::string_view id);
Concept make_concept(std::string_view id);
/// True when `id` equals `root` or lies beneath it in the ontology.
bool concept_in_subtree(std::string_view id, std::string_view root);

struct Evidence {
  std::string doc_id;
  std::string text;
  std::optional<std::string> source;
  std::optional<Date> publication_date;
  std::optional<std::pair<std::size_t, std::size_t>> location_in_doc;

  bool operator==(const Evidence&) const = default;
};

struct LatLon {
  double lat = 0;
  double lon = 0;
  bool operator==(const LatLon&) const = default;
};

struct GeoTemporalContext {
  std::optional<std::string> region_path;  // "Africa/Eastern Africa/Ethiopia"
  std::optional<LatLon> lat_lon;
  std::optional<Date> start;
  std::optional<Date> end;

  bool operator==(const GeoTemporalContext&) const = default;

  /// Closed interval; a single present endpoint is treated as a point.
  std::optional<std::pair<Date, Date>> interval() const;
};

bool is_valid_region_path(std::string_view path);
/// Segment-wise prefix: "Africa/Eastern Africa" matches "Africa/Eastern Africa/Kenya"
/// but not "Africa/Eastern Africans".
bool region_has_prefix(std::string_view path, std::string_view prefix);

struct CausalStatement {
  std::string id;
  std::string subject;  // concept id
  std::string object;   // concept id
  std::string subject_text;
  std::string object_text;
  Polarity polarity = Polarity::Unknown;
  double belief = 0.0;
  std::vector<Evidence> evidence;
  GeoTemporalContext context;
  bool discarded = false;

  bool operator==(const CausalStatement&) const = default;
};

struct ValidationIssue {
  ErrorCode code;
  std::string field;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

/// Either a statement or the complete list of violated invariants.
struct StatementValidation {
  std::optional<CausalStatement> statement;
  std::vector<ValidationIssue> errors;

  bool ok() const { return statement.has_value(); }
  bool has(ErrorCode code) const;
};

}  // namespace cagkit
