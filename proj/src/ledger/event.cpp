#include "pl/ledger/event.hpp"

#include <array>
#include <utility>

namespace pl::ledger {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 9> kKindNames{{
    {EventKind::Register, "Register"},
    {EventKind::BandUpdate, "BandUpdate"},
    {EventKind::LocationUpdate, "LocationUpdate"},
    {EventKind::TravelLog, "TravelLog"},
    {EventKind::TokenIssue, "TokenIssue"},
    {EventKind::TokenRedeem, "TokenRedeem"},
    {EventKind::HotspotIngest, "HotspotIngest"},
    {EventKind::InfoUpdate, "InfoUpdate"},
    {EventKind::Config, "Config"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
  for (auto [k, name] : kKindNames)
    if (k == kind) return name;
  return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (auto [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

std::optional<EventKind> event_kind_from_byte(std::uint8_t value) {
  for (auto [k, n] : kKindNames)
    if (static_cast<std::uint8_t>(k) == value) return k;
  return std::nullopt;
}

void encode_event(Writer& w, const Event& event) {
  w.fixed(event.id);
  w.u8(static_cast<std::uint8_t>(event.kind));
  w.opt_str(event.subject_uid);
  w.bytes(event.payload);
  w.i64(event.timestamp);
}

Bytes encode_event(const Event& event) {
  Writer w;
  encode_event(w, event);
  return std::move(w).take();
}

Event decode_event(ByteView data) {
  Reader r(data);
  Event e;
  e.id = r.fixed<16>();
  auto kind = event_kind_from_byte(r.u8());
  if (!kind) throw DecodeError("unknown event kind");
  e.kind = *kind;
  e.subject_uid = r.opt_str();
  auto payload = r.bytes();
  e.payload.assign(payload.begin(), payload.end());
  e.timestamp = r.i64();
  r.expect_end();
  return e;
}

}  // namespace pl::ledger
