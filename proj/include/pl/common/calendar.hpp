#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pl {

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

/// A UTC calendar day, stored as days since 1970-01-01.
class CalendarDate {
 public:
  constexpr CalendarDate() = default;
  static constexpr CalendarDate from_days(std::int32_t days) { return CalendarDate(days); }
  static CalendarDate from_ymd(int year, unsigned month, unsigned day);
  static CalendarDate from_timestamp(Timestamp ts);

  /// Strict `YYYY-MM-DD`; rejects impossible dates such as 2021-02-29.
  static std::optional<CalendarDate> parse(std::string_view text);

  constexpr std::int32_t days() const noexcept { return days_; }
  std::string to_string() const;

  CalendarDate plus_days(std::int32_t n) const { return CalendarDate(days_ + n); }

  friend constexpr std::int32_t operator-(CalendarDate a, CalendarDate b) {
    return a.days_ - b.days_;
  }
  friend constexpr auto operator<=>(CalendarDate, CalendarDate) = default;

 private:
  constexpr explicit CalendarDate(std::int32_t days) : days_(days) {}
  std::int32_t days_ = 0;
};

Timestamp system_now();

}  // namespace pl
