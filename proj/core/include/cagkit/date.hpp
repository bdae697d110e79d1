#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cagkit {

/// Calendar date without time of day.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  /// Parses strict "YYYY-MM-DD"; rejects impossible days (e.g. 2021-02-29).
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

}  // namespace cagkit
