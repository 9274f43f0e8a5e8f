#include "pl/registry/state.hpp"

#include <algorithm>
#include <limits>

#include "pl/common/error.hpp"
#include "pl/ledger/payloads.hpp"

namespace pl {
namespace {

using namespace ledger;

[[noreturn]] void conflict(const Event& e, const std::string& reason) {
  throw Error(Errc::ReplayConflict,
              std::string(to_string(e.kind)) + " " + crypto::to_hex(e.id) + ": " + reason,
              {{"event_id", crypto::to_hex(e.id)}, {"reason", reason}});
}

UserRecord& user_for(State& s, const Event& e) {
  auto it = s.users.find(*e.subject_uid);
  if (it == s.users.end()) conflict(e, "unknown uid " + *e.subject_uid);
  return it->second;
}

void apply_register(State& s, const Event& e, const RegisterPayload& p) {
  const auto& uid = *e.subject_uid;
  if (s.users.contains(uid)) conflict(e, "duplicate uid " + uid);
  if (p.passport && s.passport_to_uid.contains(*p.passport))
    conflict(e, "duplicate passport for uid " + s.passport_to_uid.at(*p.passport));
  UserRecord rec;
  rec.uid = uid;
  rec.passport_number = p.passport;
  rec.current_location = p.location;
  rec.additional_info = p.info;
  rec.registered_at = rec.updated_at = e.timestamp;
  s.users.emplace(uid, std::move(rec));
  if (p.passport) s.passport_to_uid.emplace(*p.passport, uid);
  s.accounts.emplace(uid, TokenAccount{uid, 0, 0, 0});
}

void apply_band(State& s, const Event& e, const BandUpdatePayload& p) {
  auto& u = user_for(s, e);
  if (u.band != p.from)
    conflict(e, "band update expects " + std::string(to_string(p.from)) + " but user is " +
                    std::string(to_string(u.band)));
  if (!transition_allowed(p.from, p.to, p.confirmed_positive))
    conflict(e, "illegal transition " + std::string(to_string(p.from)) + "->" +
                    std::string(to_string(p.to)));
  u.band = p.to;
  u.band_reason = p.reason;
  u.updated_at = e.timestamp;
}

void apply_travel(State& s, const Event& e, const TravelLogPayload& p) {
  auto& u = user_for(s, e);
  if (p.date > CalendarDate::from_timestamp(e.timestamp))
    conflict(e, "visit date after event timestamp");
  TravelVisit v{p.airport, p.date, p.note};
  auto pos = std::upper_bound(
      u.travel_history.begin(), u.travel_history.end(), v.visit_date,
      [](CalendarDate d, const TravelVisit& existing) { return d < existing.visit_date; });
  u.travel_history.insert(pos, std::move(v));
  u.updated_at = e.timestamp;
}

void apply_issue(State& s, const Event& e, const TokenIssuePayload& p) {
  auto& u = user_for(s, e);
  auto& acct = s.accounts.at(u.uid);
  if (acct.lifetime_issued > std::numeric_limits<std::uint64_t>::max() - p.amount)
    conflict(e, "token issuance overflows");
  acct.balance += p.amount;
  acct.lifetime_issued += p.amount;
  u.token_balance = acct.balance;
  u.updated_at = e.timestamp;
}

void apply_redeem(State& s, const Event& e, const TokenRedeemPayload& p) {
  auto& u = user_for(s, e);
  auto& acct = s.accounts.at(u.uid);
  if (acct.balance < p.cost) conflict(e, "redemption exceeds balance");
  acct.balance -= p.cost;
  acct.lifetime_redeemed += p.cost;
  u.token_balance = acct.balance;
  u.updated_at = e.timestamp;
}

void apply_hotspot(State& s, const Event& e, const HotspotIngestPayload& p) {
  s.hotspots.push_back(StoredHotspot{e.id, HotspotReport{p.airport, p.date, p.case_count, p.source}});
  s.hotspots_by_airport[p.airport].emplace(p.date.days(), s.hotspots.size() - 1);
}

void apply_config(State& s, const Event& e, const ConfigPayload& p) {
  if (p.key == config_keys::kAuthorityKey) {
    if (p.value.size() != 32) conflict(e, "authority key must be 32 bytes");
    if (s.config.authority_key) conflict(e, "authority key already configured");
    crypto::PublicKey key{};
    std::copy(p.value.begin(), p.value.end(), key.begin());
    s.config.authority_key = key;
  } else if (p.key == config_keys::kPolicyDigest) {
    if (p.value.size() != 32) conflict(e, "policy digest must be 32 bytes");
    crypto::Digest d{};
    std::copy(p.value.begin(), p.value.end(), d.begin());
    s.config.policy_digest = d;
  }
  // other keys are recorded on chain only
}

void write_visit(Writer& w, const TravelVisit& v) {
  w.str(v.airport_code);
  w.i32(v.visit_date.days());
  w.opt_str(v.note);
}

}  // namespace

const UserRecord* State::find_uid(std::string_view uid) const {
  auto it = users.find(std::string(uid));
  return it == users.end() ? nullptr : &it->second;
}

const UserRecord* State::find_passport(std::string_view passport) const {
  auto it = passport_to_uid.find(std::string(passport));
  return it == passport_to_uid.end() ? nullptr : find_uid(it->second);
}

Bytes State::serialize() const {
  Writer w;
  w.u64(users.size());
  for (const auto& [uid, u] : users) {
    w.str(u.uid);
    w.opt_str(u.passport_number);
    w.u8(static_cast<std::uint8_t>(u.band));
    w.str(u.band_reason);
    w.u64(u.token_balance);
    w.str(u.current_location);
    w.str(u.additional_info);
    w.u32(static_cast<std::uint32_t>(u.travel_history.size()));
    for (const auto& v : u.travel_history) write_visit(w, v);
    w.i64(u.registered_at);
    w.i64(u.updated_at);
  }
  w.u64(passport_to_uid.size());
  for (const auto& [passport, uid] : passport_to_uid) {
    w.str(passport);
    w.str(uid);
  }
  w.u64(accounts.size());
  for (const auto& [uid, a] : accounts) {
    w.str(a.uid);
    w.u64(a.balance);
    w.u64(a.lifetime_issued);
    w.u64(a.lifetime_redeemed);
  }
  w.u64(hotspots.size());
  for (const auto& h : hotspots) {
    w.fixed(h.event_id);
    w.str(h.report.airport_code);
    w.i32(h.report.case_date.days());
    w.u32(h.report.case_count);
    w.str(h.report.source);
  }
  w.boolean(config.authority_key.has_value());
  if (config.authority_key) w.fixed(*config.authority_key);
  w.boolean(config.policy_digest.has_value());
  if (config.policy_digest) w.fixed(*config.policy_digest);
  w.u64(events_applied);
  w.boolean(height.has_value());
  if (height) w.u64(*height);
  return std::move(w).take();
}

void apply_event(State& state, const Event& event) {
  Payload payload;
  try {
    validate_event(event);
    payload = decode_payload(event.kind, event.payload);
  } catch (const Error& e) {
    conflict(event, e.what());
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RegisterPayload>) apply_register(state, event, p);
        else if constexpr (std::is_same_v<T, BandUpdatePayload>) apply_band(state, event, p);
        else if constexpr (std::is_same_v<T, LocationUpdatePayload>) {
          auto& u = user_for(state, event);
          u.current_location = p.location;
          u.updated_at = event.timestamp;
        } else if constexpr (std::is_same_v<T, TravelLogPayload>) apply_travel(state, event, p);
        else if constexpr (std::is_same_v<T, TokenIssuePayload>) apply_issue(state, event, p);
        else if constexpr (std::is_same_v<T, TokenRedeemPayload>) apply_redeem(state, event, p);
        else if constexpr (std::is_same_v<T, HotspotIngestPayload>) apply_hotspot(state, event, p);
        else if constexpr (std::is_same_v<T, InfoUpdatePayload>) {
          auto& u = user_for(state, event);
          u.additional_info = p.text;
          u.updated_at = event.timestamp;
        } else if constexpr (std::is_same_v<T, ConfigPayload>) apply_config(state, event, p);
      },
      payload);
  ++state.events_applied;
}

void apply_block(State& state, const Block& block) {
  for (const auto& e : block.events) apply_event(state, e);
  state.height = block.height;
}

State replay(const Ledger& ledger) {
  const auto report = ledger.verify_all();
  if (!report.ok())
    throw Error(Errc::ChainInvalid,
                "chain fails verification at height " + std::to_string(report.failure->height) +
                    ": " + std::string(to_string(report.failure->kind)) + " (" +
                    report.failure->detail + ")",
                {{"height", static_cast<std::int64_t>(report.failure->height)},
                 {"failure", std::string(to_string(report.failure->kind))}});
  State state;
  const auto n = ledger.size();
  for (Height h = 0; h < n; ++h) apply_block(state, ledger.get_block(h));
  return state;
}

}  // namespace pl
