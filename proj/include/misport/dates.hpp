#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace misport::dates {

/// Parses a strict `YYYY-MM-DD` calendar date.
std::optional<std::chrono::year_month_day> parse_iso(std::string_view text);

std::string format_iso(std::chrono::year_month_day date);

/// `count` consecutive Monday-to-Friday dates starting at (or after) `first`.
std::vector<std::string> business_days(std::chrono::year_month_day first, std::size_t count);

/// "YYYY-MM" prefix of an ISO date; dates compare correctly as strings.
inline std::string_view month_key(std::string_view iso) { return iso.substr(0, 7); }

/// Same day-of-month `months` calendar months away, clamped to the month end.
std::string add_months(std::string_view iso, int months);

}  // namespace misport::dates
