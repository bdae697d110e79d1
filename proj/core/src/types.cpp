#include "cagkit/types.hpp"

#include <algorithm>
#include <cctype>

namespace cagkit {

int polarity_to_wire(Polarity p) {
  switch (p) {
    case Polarity::Same: return 1;
    case Polarity::Opposite: return -1;
    case Polarity::Unknown: return 0;
  }
  return 0;
}

std::optional<Polarity> polarity_from_wire(int value) {
  switch (value) {
    case 1: return Polarity::Same;
    case -1: return Polarity::Opposite;
    case 0: return Polarity::Unknown;
    default: return std::nullopt;
  }
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Same: return "same";
    case Polarity::Opposite: return "opposite";
    case Polarity::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(AggregatePolarity p) {
  switch (p) {
    case AggregatePolarity::Same: return "same";
    case AggregatePolarity::Opposite: return "opposite";
    case AggregatePolarity::Ambiguous: return "ambiguous";
    case AggregatePolarity::NoEvidence: return "no_evidence";
  }
  return "ambiguous";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<Polarity> parse_polarity(std::string_view text) {
  const auto t = lower(text);
  if (t == "same" || t == "1" || t == "+1") return Polarity::Same;
  if (t == "opposite" || t == "-1") return Polarity::Opposite;
  if (t == "unknown" || t == "0") return Polarity::Unknown;
  return std::nullopt;
}

std::optional<AggregatePolarity> parse_aggregate_polarity(std::string_view text) {
  const auto t = lower(text);
  if (t == "same") return AggregatePolarity::Same;
  if (t == "opposite") return AggregatePolarity::Opposite;
  if (t == "ambiguous") return AggregatePolarity::Ambiguous;
  if (t == "no_evidence") return AggregatePolarity::NoEvidence;
  return std::nullopt;
}

bool is_valid_concept_id(std::string_view id) {
  if (id.empty()) return false;
  bool segment_empty = true;
  for (char c : id) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    if (std::isupper(static_cast<unsigned char>(c))) return false;
    if (c == '/') {
      if (segment_empty) return false;
      segment_empty = true;
    } else {
      segment_empty = false;
    }
  }
  return !segment_empty;
}

std::string concept_parent(std::string_view id) {
  const auto pos = id.rfind('/');
  if (pos == std::string_view::npos) return {};
  return std::string(id.substr(0, pos));
}

std::string_view concept_leaf(std::string_view id) {
  const auto pos = id.rfind('/');
  return pos == std::string_view::npos ? id : id.substr(pos + 1);
}

int concept_depth(std::string_view id) {
  if (id.empty()) return 0;
  return 1 + static_cast<int>(std::count(id.begin(), id.end(), '/'));
}

std::string derive_display_name(std::string_view id) {
  std::string out;
  bool start_of_word = true;
  for (char c : concept_leaf(id)) {
    if (c == '_') {
      out.push_back(' ');
      start_of_word = true;
      continue;
    }
    const auto uc = static_cast<unsigned char>(c);
    out.push_back(static_cast<char>(start_of_word ? std::toupper(uc) : std::tolower(uc)));
    start_of_word = false;
  }
  return out;
}

Concept make_concept(std::string_view id) {
  return Concept{std::string(id), derive_display_name(id), concept_depth(id)};
}

bool concept_in_subtree(std::string_view id, std::string_view root) {
  if (id.size() < root.size() || id.compare(0, root.size(), root) != 0) return false;
  return id.size() == root.size() || id[root.size()] == '/';
}

std::optional<std::pair<Date, Date>> GeoTemporalContext::interval() const {
  if (start && end) return std::pair{*start, *end};
  if (start) return std::pair{*start, *start};
  if (end) return std::pair{*end, *end};
  return std::nullopt;
}

bool is_valid_region_path(std::string_view path) {
  if (path.empty()) return false;
  std::size_t begin = 0;
  while (begin <= path.size()) {
    const auto end = std::min(path.find('/', begin), path.size());
    const auto segment = path.substr(begin, end - begin);
    if (segment.empty()) return false;
    if (std::isspace(static_cast<unsigned char>(segment.front())) ||
        std::isspace(static_cast<unsigned char>(segment.back())))
      return false;
    begin = end + 1;
  }
  return true;
}

bool region_has_prefix(std::string_view path, std::string_view prefix) {
  return concept_in_subtree(path, prefix);
}

bool StatementValidation::has(ErrorCode code) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const ValidationIssue& e) { return e.code == code; });
}

}  // namespace cagkit
