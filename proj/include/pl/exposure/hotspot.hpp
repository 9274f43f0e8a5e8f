#pragma once

#include <cstdint>
#include <string>

#include "pl/common/calendar.hpp"
#include "pl/ledger/event.hpp"
#include "pl/registry/user_record.hpp"

namespace pl {

struct HotspotReport {
  std::string airport_code;
  CalendarDate case_date;
  std::uint32_t case_count = 1;
  std::string source;

  friend bool operator==(const HotspotReport&, const HotspotReport&) = default;
};

/// A report as recorded on chain.
struct StoredHotspot {
  ledger::EventId event_id{};
  HotspotReport report;

  friend bool operator==(const StoredHotspot&, const StoredHotspot&) = default;
};

inline constexpr std::int32_t kSuspicionWindowDays = 14;

struct SuspicionFinding {
  std::string uid;
  TravelVisit visit;
  StoredHotspot report;
  /// case_date - visit_date, in [-14, +14]
  std::int32_t day_offset = 0;

  friend bool operator==(const SuspicionFinding&, const SuspicionFinding&) = default;
};

}  // namespace pl
