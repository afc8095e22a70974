#include "misport/dates.hpp"

#include "misport/error.hpp"

#include <charconv>
#include <cstdio>

namespace misport::dates {

namespace {

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

std::optional<std::chrono::year_month_day> parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_int(text.substr(0, 4));
  const auto m = parse_int(text.substr(5, 2));
  const auto d = parse_int(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day date{std::chrono::year{*y},
                                         std::chrono::month{static_cast<unsigned>(*m)},
                                         std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::vector<std::string> business_days(std::chrono::year_month_day first, std::size_t count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day{first};
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.push_back(format_iso(year_month_day{day}));
    day += days{1};
  }
  return out;
}

std::string add_months(std::string_view iso, int months) {
  using namespace std::chrono;
  const auto date = parse_iso(iso);
  if (!date) fail(ErrorCode::Parse, "invalid ISO date '" + std::string(iso) + "'");
  const year_month shifted = year_month{date->year(), date->month()} + std::chrono::months{months};
  const auto last = year_month_day_last{shifted.year(), month_day_last{shifted.month()}}.day();
  const auto d = date->day() > last ? last : date->day();
  return format_iso(year_month_day{shifted.year(), shifted.month(), d});
}

}  // namespace misport::dates
