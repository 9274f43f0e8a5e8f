#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pl/common/calendar.hpp"
#include "pl/registry/band.hpp"

namespace pl {

struct TravelVisit {
  std::string airport_code;
  CalendarDate visit_date;
  std::optional<std::string> note;

  friend bool operator==(const TravelVisit&, const TravelVisit&) = default;
};

struct UserRecord {
  std::string uid;
  std::optional<std::string> passport_number;
  ColourBand band = ColourBand::Green;
  std::string band_reason;
  std::uint64_t token_balance = 0;
  std::string current_location;
  std::string additional_info;
  std::vector<TravelVisit> travel_history;  // sorted by visit_date, stable
  Timestamp registered_at = 0;
  Timestamp updated_at = 0;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

}  // namespace pl
