#include "pl/common/calendar.hpp"

#include <cstdio>

namespace pl {

using namespace std::chrono;

CalendarDate CalendarDate::from_ymd(int y, unsigned m, unsigned d) {
  const sys_days sd{year{y} / month{m} / day{d}};
  return CalendarDate(static_cast<std::int32_t>(sd.time_since_epoch().count()));
}

CalendarDate CalendarDate::from_timestamp(Timestamp ts) {
  // floor division so pre-epoch instants land on the right day
  auto days = ts / 86400;
  if (ts % 86400 < 0) --days;
  return CalendarDate(static_cast<std::int32_t>(days));
}

std::optional<CalendarDate> CalendarDate::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return CalendarDate(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

std::string CalendarDate::to_string() const {
  const year_month_day ymd{sys_days{std::chrono::days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp system_now() {
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace pl
