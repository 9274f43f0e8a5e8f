#include "pl/ledger/payloads.hpp"

#include "pl/common/error.hpp"
#include "pl/common/text.hpp"

namespace pl::ledger {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_text(const std::string& s, std::size_t cap, const char* field) {
  if (s.size() > cap) throw DecodeError(std::string(field) + " exceeds length cap");
  if (!is_valid_utf8(s)) throw DecodeError(std::string(field) + " is not valid UTF-8");
}

ColourBand read_band(Reader& r) {
  auto band = band_from_byte(r.u8());
  if (!band) throw DecodeError("band out of range");
  return *band;
}

void write(Writer& w, const RegisterPayload& p) {
  w.opt_str(p.passport);
  w.str(p.location);
  w.str(p.info);
}
void write(Writer& w, const BandUpdatePayload& p) {
  w.u8(static_cast<std::uint8_t>(p.from));
  w.u8(static_cast<std::uint8_t>(p.to));
  w.str(p.reason);
  w.boolean(p.confirmed_positive);
  w.u32(static_cast<std::uint32_t>(p.findings.size()));
  for (const auto& f : p.findings) w.str(f);
}
void write(Writer& w, const LocationUpdatePayload& p) { w.str(p.location); }
void write(Writer& w, const TravelLogPayload& p) {
  w.str(p.airport);
  w.i32(p.date.days());
  w.opt_str(p.note);
}
void write(Writer& w, const TokenIssuePayload& p) {
  w.str(p.reason);
  w.u64(p.amount);
}
void write(Writer& w, const TokenRedeemPayload& p) {
  w.str(p.benefit_id);
  w.u64(p.cost);
}
void write(Writer& w, const HotspotIngestPayload& p) {
  w.str(p.airport);
  w.i32(p.date.days());
  w.u32(p.case_count);
  w.str(p.source);
}
void write(Writer& w, const InfoUpdatePayload& p) { w.str(p.text); }
void write(Writer& w, const ConfigPayload& p) {
  w.str(p.key);
  w.bytes(p.value);
}

Payload read(EventKind kind, Reader& r) {
  switch (kind) {
    case EventKind::Register: {
      RegisterPayload p;
      p.passport = r.opt_str();
      p.location = r.str();
      p.info = r.str();
      if (p.passport) {
        if (p.passport->empty()) throw DecodeError("empty passport must be encoded as absent");
        check_text(*p.passport, limits::kPassportBytes, "passport");
      }
      check_text(p.location, limits::kLocationBytes, "location");
      check_text(p.info, limits::kInfoBytes, "info");
      return p;
    }
    case EventKind::BandUpdate: {
      BandUpdatePayload p;
      p.from = read_band(r);
      p.to = read_band(r);
      p.reason = r.str();
      p.confirmed_positive = r.boolean();
      const auto n = r.u32();
      if (n > r.remaining()) throw DecodeError("finding count exceeds input");
      p.findings.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) p.findings.push_back(r.str());
      check_text(p.reason, limits::kReasonBytes, "reason");
      return p;
    }
    case EventKind::LocationUpdate: {
      LocationUpdatePayload p{r.str()};
      check_text(p.location, limits::kLocationBytes, "location");
      return p;
    }
    case EventKind::TravelLog: {
      TravelLogPayload p;
      p.airport = r.str();
      p.date = CalendarDate::from_days(r.i32());
      p.note = r.opt_str();
      if (!is_airport_code(p.airport)) throw DecodeError("invalid airport code");
      if (p.note) check_text(*p.note, limits::kNoteBytes, "note");
      return p;
    }
    case EventKind::TokenIssue: {
      TokenIssuePayload p;
      p.reason = r.str();
      p.amount = r.u64();
      if (p.amount == 0) throw DecodeError("token amount must be positive");
      if (p.reason.empty()) throw DecodeError("empty reason code");
      return p;
    }
    case EventKind::TokenRedeem: {
      TokenRedeemPayload p;
      p.benefit_id = r.str();
      p.cost = r.u64();
      if (p.cost == 0) throw DecodeError("redemption cost must be positive");
      if (p.benefit_id.empty()) throw DecodeError("empty benefit id");
      return p;
    }
    case EventKind::HotspotIngest: {
      HotspotIngestPayload p;
      p.airport = r.str();
      p.date = CalendarDate::from_days(r.i32());
      p.case_count = r.u32();
      p.source = r.str();
      if (!is_airport_code(p.airport)) throw DecodeError("invalid airport code");
      if (p.case_count == 0) throw DecodeError("case_count must be positive");
      check_text(p.source, limits::kSourceBytes, "source");
      return p;
    }
    case EventKind::InfoUpdate: {
      InfoUpdatePayload p{r.str()};
      check_text(p.text, limits::kInfoBytes, "info");
      return p;
    }
    case EventKind::Config: {
      ConfigPayload p;
      p.key = r.str();
      auto v = r.bytes();
      p.value.assign(v.begin(), v.end());
      if (p.key.empty()) throw DecodeError("empty config key");
      return p;
    }
  }
  throw DecodeError("unknown event kind");
}

}  // namespace

EventKind kind_of(const Payload& payload) {
  return std::visit(
      overloaded{
          [](const RegisterPayload&) { return EventKind::Register; },
          [](const BandUpdatePayload&) { return EventKind::BandUpdate; },
          [](const LocationUpdatePayload&) { return EventKind::LocationUpdate; },
          [](const TravelLogPayload&) { return EventKind::TravelLog; },
          [](const TokenIssuePayload&) { return EventKind::TokenIssue; },
          [](const TokenRedeemPayload&) { return EventKind::TokenRedeem; },
          [](const HotspotIngestPayload&) { return EventKind::HotspotIngest; },
          [](const InfoUpdatePayload&) { return EventKind::InfoUpdate; },
          [](const ConfigPayload&) { return EventKind::Config; },
      },
      payload);
}

Bytes encode_payload(const Payload& payload) {
  Writer w;
  std::visit([&](const auto& p) { write(w, p); }, payload);
  return std::move(w).take();
}

Payload decode_payload(EventKind kind, ByteView data) {
  Reader r(data);
  auto p = read(kind, r);
  r.expect_end();
  return p;
}

Event make_event(const EventId& id, std::optional<std::string> subject, const Payload& payload,
                 Timestamp timestamp) {
  return Event{id, kind_of(payload), std::move(subject), encode_payload(payload), timestamp};
}

void validate_event(const Event& event) {
  const auto kind = std::string(to_string(event.kind));
  if (is_subjectless(event.kind)) {
    if (event.subject_uid)
      throw Error(Errc::InvalidEvent, kind + " event must not carry a subject",
                  {{"kind", kind}, {"reason", std::string("unexpected subject")}});
  } else if (!event.subject_uid || event.subject_uid->empty()) {
    throw Error(Errc::InvalidEvent, kind + " event requires a subject uid",
                {{"kind", kind}, {"reason", std::string("missing subject")}});
  }
  try {
    decode_payload(event.kind, event.payload);
  } catch (const DecodeError& e) {
    throw Error(Errc::InvalidEvent, kind + " payload: " + e.what(),
                {{"kind", kind}, {"reason", std::string(e.what())}});
  }
}

}  // namespace pl::ledger
