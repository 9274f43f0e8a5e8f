#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "pl/common/calendar.hpp"
#include "pl/common/codec.hpp"

namespace pl::ledger {

enum class EventKind : std::uint8_t {
  Register = 1,
  BandUpdate = 2,
  LocationUpdate = 3,
  TravelLog = 4,
  TokenIssue = 5,
  TokenRedeem = 6,
  HotspotIngest = 7,
  InfoUpdate = 8,
  // chain configuration (genesis authority key, policy digests); no subject
  Config = 9,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);
std::optional<EventKind> event_kind_from_byte(std::uint8_t value);

/// Kinds that never carry a subject uid.
constexpr bool is_subjectless(EventKind kind) {
  return kind == EventKind::HotspotIngest || kind == EventKind::Config;
}

using EventId = std::array<std::uint8_t, 16>;

struct EventIdHash {
  std::size_t operator()(const EventId& id) const noexcept {
    std::size_t h;
    std::memcpy(&h, id.data(), sizeof h);
    return h;
  }
};

struct Event {
  EventId id{};
  EventKind kind = EventKind::Register;
  std::optional<std::string> subject_uid;
  Bytes payload;  // canonical encoding of the kind's payload record
  Timestamp timestamp = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

// id(16) | kind(u8) | opt subject | bytes payload | i64 timestamp
void encode_event(Writer& w, const Event& event);
Bytes encode_event(const Event& event);
/// Structural decode; the payload is not interpreted. Unknown kinds rejected.
Event decode_event(ByteView data);

}  // namespace pl::ledger
