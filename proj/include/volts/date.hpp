#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace volts {

// Calendar day (daily timeframe). Thin wrapper over sys_days so it can be
// ordered, hashed by day count and printed as ISO-8601.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}}) {}

  // Parses YYYY-MM-DD; throws Error(InvalidArgument) otherwise.
  static Date parse(std::string_view text);

  constexpr std::chrono::sys_days days() const { return days_; }
  constexpr long count() const { return days_.time_since_epoch().count(); }

  constexpr Date next() const { return Date{days_ + std::chrono::days{1}}; }
  constexpr Date prev() const { return Date{days_ - std::chrono::days{1}}; }

  std::string iso() const;

  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace volts
