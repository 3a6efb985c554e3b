#include "volts/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "volts/error.hpp"

namespace volts {

namespace {
bool parse_int(std::string_view text, int& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}
}  // namespace

Date Date::parse(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
      !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
    throw Error(ErrorCode::InvalidArgument, "not an ISO-8601 date: '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::InvalidArgument, "invalid calendar date: '" + std::string(text) + "'");
  }
  return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{days_};
  return fmt::format("{:04d}-{:02d}-{:02d}", int(ymd.year()), unsigned(ymd.month()),
                     unsigned(ymd.day()));
}

}  // namespace volts
