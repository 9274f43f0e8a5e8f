#include "pl/registry/registry.hpp"

#include "pl/common/text.hpp"

namespace pl {

using namespace ledger;

namespace registry {

std::optional<std::string> normalize_passport(const std::optional<std::string>& passport) {
  if (!passport) return std::nullopt;
  auto trimmed = trim(*passport);
  if (trimmed.empty()) return std::nullopt;
  return trimmed;
}

const UserRecord& require_user(const State& state, const std::string& uid) {
  const auto* user = state.find_uid(uid);
  if (!user) throw Error(Errc::UnknownUid, "unknown uid " + uid, {{"uid", uid}});
  return *user;
}

void check_text_field(std::string_view value, std::size_t cap, std::string_view field) {
  if (value.size() > cap)
    throw Error(Errc::TooLong,
                std::string(field) + " exceeds " + std::to_string(cap) + " bytes",
                {{"field", std::string(field)}, {"limit", static_cast<std::int64_t>(cap)}});
  if (!is_valid_utf8(value))
    throw Error(Errc::ValidationError, std::string(field) + " is not valid UTF-8",
                {{"field", std::string(field)}});
}

std::string emit_register(Tx& tx, const std::optional<std::string>& passport,
                          const std::string& location, const std::string& info) {
  const auto normalized = normalize_passport(passport);
  if (normalized) {
    check_text_field(*normalized, limits::kPassportBytes, "passport_number");
    if (const auto* existing = tx.state().find_passport(*normalized))
      throw Error(Errc::DuplicatePassport, "passport already registered to " + existing->uid,
                  {{"existing_uid", existing->uid}});
  }
  check_text_field(location, limits::kLocationBytes, "current_location");
  check_text_field(info, limits::kInfoBytes, "additional_info");
  auto uid = tx.new_uid();
  tx.emit(uid, RegisterPayload{normalized, location, info});
  return uid;
}

void emit_band_update(Tx& tx, const UserRecord& user, ColourBand to, const std::string& reason,
                      bool confirmed_positive, std::vector<std::string> findings) {
  check_text_field(reason, limits::kReasonBytes, "reason");
  if (!transition_allowed(user.band, to, confirmed_positive))
    throw Error(Errc::IllegalTransition,
                "cannot move from " + std::string(to_string(user.band)) + " to " +
                    std::string(to_string(to)),
                {{"from", std::string(to_string(user.band))},
                 {"to", std::string(to_string(to))}});
  tx.emit(user.uid, BandUpdatePayload{user.band, to, reason,
                                      confirmed_positive && user.band == ColourBand::Green &&
                                          to == ColourBand::Red,
                                      std::move(findings)});
}

}  // namespace registry

namespace {

auto project_user(const std::string& uid) {
  return [uid](const State& s) { return *s.find_uid(uid); };
}

Recorded<UserRecord> recorded(std::pair<UserRecord, std::optional<Height>> r) {
  return {std::move(r.first), r.second.value_or(0)};
}

}  // namespace

Recorded<UserRecord> Registry::register_user(std::optional<std::string> passport_number,
                                             std::string initial_location,
                                             std::string additional_info) {
  std::string uid;
  return recorded(engine_.transact(
      [&](Tx& tx) {
        uid = registry::emit_register(tx, passport_number, initial_location, additional_info);
      },
      [&](const State& s) { return *s.find_uid(uid); }));
}

Recorded<UserRecord> Registry::update_band(const std::string& uid, ColourBand new_band,
                                           std::string reason, bool confirmed_positive) {
  return recorded(engine_.transact(
      [&](Tx& tx) {
        const auto& user = registry::require_user(tx.state(), uid);
        registry::emit_band_update(tx, user, new_band, reason, confirmed_positive);
      },
      project_user(uid)));
}

Recorded<UserRecord> Registry::log_travel(const std::string& uid, TravelVisit visit) {
  return recorded(engine_.transact(
      [&](Tx& tx) {
        registry::require_user(tx.state(), uid);
        if (!is_airport_code(visit.airport_code))
          throw Error(Errc::InvalidAirportCode,
                      "airport code must be three uppercase letters: " + visit.airport_code,
                      {{"airport_code", visit.airport_code}});
        if (visit.visit_date > CalendarDate::from_timestamp(tx.now()))
          throw Error(Errc::FutureDate, "visit date " + visit.visit_date.to_string() +
                                            " is in the future",
                      {{"visit_date", visit.visit_date.to_string()}});
        if (visit.note) {
          if (visit.note->empty()) visit.note.reset();
          else registry::check_text_field(*visit.note, limits::kNoteBytes, "note");
        }
        tx.emit(uid, TravelLogPayload{visit.airport_code, visit.visit_date, visit.note});
      },
      project_user(uid)));
}

Recorded<UserRecord> Registry::update_location(const std::string& uid, std::string location) {
  return recorded(engine_.transact(
      [&](Tx& tx) {
        registry::require_user(tx.state(), uid);
        registry::check_text_field(location, limits::kLocationBytes, "location");
        tx.emit(uid, LocationUpdatePayload{location});
      },
      project_user(uid)));
}

Recorded<UserRecord> Registry::update_info(const std::string& uid, std::string text) {
  return recorded(engine_.transact(
      [&](Tx& tx) {
        registry::require_user(tx.state(), uid);
        registry::check_text_field(text, limits::kInfoBytes, "additional_info");
        tx.emit(uid, InfoUpdatePayload{text});
      },
      project_user(uid)));
}

std::optional<UserRecord> Registry::find_by_uid(std::string_view uid) const {
  return engine_.read([&](const State& s) -> std::optional<UserRecord> {
    if (const auto* u = s.find_uid(uid)) return *u;
    return std::nullopt;
  });
}

std::optional<UserRecord> Registry::find_by_passport(std::string_view passport) const {
  const auto normalized = trim(passport);
  return engine_.read([&](const State& s) -> std::optional<UserRecord> {
    if (const auto* u = s.find_passport(normalized)) return *u;
    return std::nullopt;
  });
}

UserRecord Registry::find_user(std::string_view query) const {
  const auto q = trim(query);
  auto found = engine_.read([&](const State& s) -> std::optional<UserRecord> {
    if (const auto* u = s.find_uid(q)) return *u;
    if (const auto* u = s.find_passport(q)) return *u;
    return std::nullopt;
  });
  if (!found) throw Error(Errc::NotFound, "no record for " + q, {{"query", q}});
  return *found;
}

}  // namespace pl
