#pragma once

// Kind-specific payload schemas. Each payload is stored inside Event::payload
// in its canonical encoding; `decode_payload` is the schema check.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pl/common/calendar.hpp"
#include "pl/common/codec.hpp"
#include "pl/ledger/event.hpp"
#include "pl/registry/band.hpp"

namespace pl::ledger {

struct RegisterPayload {
  std::optional<std::string> passport;
  std::string location;
  std::string info;
  friend bool operator==(const RegisterPayload&, const RegisterPayload&) = default;
};

struct BandUpdatePayload {
  ColourBand from = ColourBand::Green;
  ColourBand to = ColourBand::Green;
  std::string reason;
  bool confirmed_positive = false;
  /// Hex event ids of the hotspot reports that triggered an exposure flag.
  std::vector<std::string> findings;
  friend bool operator==(const BandUpdatePayload&, const BandUpdatePayload&) = default;
};

struct LocationUpdatePayload {
  std::string location;
  friend bool operator==(const LocationUpdatePayload&, const LocationUpdatePayload&) = default;
};

struct TravelLogPayload {
  std::string airport;
  CalendarDate date;
  std::optional<std::string> note;
  friend bool operator==(const TravelLogPayload&, const TravelLogPayload&) = default;
};

struct TokenIssuePayload {
  std::string reason;
  std::uint64_t amount = 0;
  friend bool operator==(const TokenIssuePayload&, const TokenIssuePayload&) = default;
};

struct TokenRedeemPayload {
  std::string benefit_id;
  std::uint64_t cost = 0;
  friend bool operator==(const TokenRedeemPayload&, const TokenRedeemPayload&) = default;
};

struct HotspotIngestPayload {
  std::string airport;
  CalendarDate date;
  std::uint32_t case_count = 0;
  std::string source;
  friend bool operator==(const HotspotIngestPayload&, const HotspotIngestPayload&) = default;
};

struct InfoUpdatePayload {
  std::string text;
  friend bool operator==(const InfoUpdatePayload&, const InfoUpdatePayload&) = default;
};

struct ConfigPayload {
  std::string key;
  Bytes value;
  friend bool operator==(const ConfigPayload&, const ConfigPayload&) = default;
};

namespace config_keys {
inline constexpr std::string_view kAuthorityKey = "authority_key";
inline constexpr std::string_view kPolicyDigest = "redemption_policy_sha256";
}  // namespace config_keys

using Payload = std::variant<RegisterPayload, BandUpdatePayload, LocationUpdatePayload,
                             TravelLogPayload, TokenIssuePayload, TokenRedeemPayload,
                             HotspotIngestPayload, InfoUpdatePayload, ConfigPayload>;

EventKind kind_of(const Payload& payload);
Bytes encode_payload(const Payload& payload);

/// Strict structural decode plus value checks (band range, airport code,
/// positive counts, length caps, UTF-8). Throws DecodeError.
Payload decode_payload(EventKind kind, ByteView data);

Event make_event(const EventId& id, std::optional<std::string> subject, const Payload& payload,
                 Timestamp timestamp);

/// Throws Error{InvalidEvent} if the payload does not satisfy its kind's
/// schema or the subject rule is violated.
void validate_event(const Event& event);

template <class T>
T payload_as(const Event& event) {
  return std::get<T>(decode_payload(event.kind, event.payload));
}

}  // namespace pl::ledger
