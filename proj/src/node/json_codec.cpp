#include "pl/node/json_codec.hpp"

#include "pl/ledger/payloads.hpp"

namespace pl::node {

using namespace ledger;

namespace {

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

json payload_json(const Event& e) {
  Payload payload;
  try {
    payload = decode_payload(e.kind, e.payload);
  } catch (const DecodeError& err) {
    return {{"error", err.what()}, {"raw", crypto::to_hex(e.payload)}};
  }
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RegisterPayload>)
          return {{"passport_number", opt(p.passport)},
                  {"current_location", p.location},
                  {"additional_info", p.info}};
        else if constexpr (std::is_same_v<T, BandUpdatePayload>)
          return {{"from", to_string(p.from)},
                  {"to", to_string(p.to)},
                  {"reason", p.reason},
                  {"confirmed_positive", p.confirmed_positive},
                  {"findings", p.findings}};
        else if constexpr (std::is_same_v<T, LocationUpdatePayload>)
          return {{"location", p.location}};
        else if constexpr (std::is_same_v<T, TravelLogPayload>)
          return {{"airport_code", p.airport},
                  {"visit_date", p.date.to_string()},
                  {"note", opt(p.note)}};
        else if constexpr (std::is_same_v<T, TokenIssuePayload>)
          return {{"reason", p.reason}, {"amount", p.amount}};
        else if constexpr (std::is_same_v<T, TokenRedeemPayload>)
          return {{"benefit_id", p.benefit_id}, {"cost", p.cost}};
        else if constexpr (std::is_same_v<T, HotspotIngestPayload>)
          return {{"airport_code", p.airport},
                  {"case_date", p.date.to_string()},
                  {"case_count", p.case_count},
                  {"source", p.source}};
        else if constexpr (std::is_same_v<T, InfoUpdatePayload>)
          return {{"text", p.text}};
        else
          return {{"key", p.key}, {"value", crypto::to_hex(p.value)}};
      },
      payload);
}

}  // namespace

json to_json(const TravelVisit& v) {
  return {{"airport_code", v.airport_code},
          {"visit_date", v.visit_date.to_string()},
          {"note", opt(v.note)}};
}

json to_json(const UserRecord& u) {
  json history = json::array();
  for (const auto& v : u.travel_history) history.push_back(to_json(v));
  return {{"uid", u.uid},
          {"passport_number", opt(u.passport_number)},
          {"band", to_string(u.band)},
          {"band_reason", u.band_reason},
          {"token_balance", u.token_balance},
          {"current_location", u.current_location},
          {"additional_info", u.additional_info},
          {"travel_history", std::move(history)},
          {"registered_at", u.registered_at},
          {"updated_at", u.updated_at}};
}

json to_json(const TokenAccount& a) {
  return {{"uid", a.uid},
          {"balance", a.balance},
          {"lifetime_issued", a.lifetime_issued},
          {"lifetime_redeemed", a.lifetime_redeemed}};
}

json to_json(const RedemptionReceipt& r) {
  return {{"uid", r.uid},
          {"benefit_id", r.benefit_id},
          {"cost", r.cost},
          {"remaining_balance", r.remaining_balance},
          {"block_height", r.block_height}};
}

json to_json(const SuspicionFinding& f) {
  return {{"uid", f.uid},
          {"visit", to_json(f.visit)},
          {"report",
           {{"event_id", crypto::to_hex(f.report.event_id)},
            {"airport_code", f.report.report.airport_code},
            {"case_date", f.report.report.case_date.to_string()},
            {"case_count", f.report.report.case_count},
            {"source", f.report.report.source}}},
          {"day_offset", f.day_offset}};
}

json to_json(const RedemptionPolicy& p) {
  json benefits = json::array(), reasons = json::array();
  for (const auto& b : p.benefits)
    benefits.push_back({{"benefit_id", b.benefit_id},
                        {"cost", b.cost},
                        {"description", b.description},
                        {"enabled", b.enabled}});
  for (const auto& r : p.reasons)
    reasons.push_back({{"code", r.code}, {"description", r.description}});
  return {{"benefits", std::move(benefits)},
          {"reasons", std::move(reasons)},
          {"digest", crypto::to_hex(p.digest)}};
}

json to_json(const VerifyResponse& r) {
  return {{"uid", r.uid},
          {"band", to_string(r.band)},
          {"band_reason", r.band_reason},
          {"as_of_block", r.as_of_block},
          {"chain_head_hash", crypto::to_hex(r.chain_head_hash)}};
}

json to_json(const VerificationReport& r) {
  json out{{"ok", r.ok()}, {"from", r.from}, {"to", r.to}, {"checked", r.checked},
           {"failure", nullptr}};
  if (r.failure)
    out["failure"] = {{"height", r.failure->height},
                      {"class", to_string(r.failure->kind)},
                      {"detail", r.failure->detail}};
  return out;
}

json to_json(const Event& e) {
  return {{"event_id", crypto::to_hex(e.id)},
          {"kind", to_string(e.kind)},
          {"subject_uid", opt(e.subject_uid)},
          {"timestamp", e.timestamp},
          {"payload", payload_json(e)}};
}

json to_json(const Block& b, const crypto::PublicKey& key) {
  json events = json::array();
  for (const auto& e : b.events) events.push_back(to_json(e));
  return {{"height", b.height},
          {"prev_hash", crypto::to_hex(b.prev_hash)},
          {"events_root", crypto::to_hex(b.events_root)},
          {"timestamp", b.timestamp},
          {"authority_id", b.authority_id},
          {"signature", crypto::to_hex(b.signature)},
          {"block_hash", crypto::to_hex(b.block_hash)},
          {"signature_valid", crypto::verify(key, signing_message(b), b.signature)},
          {"events", std::move(events)}};
}

json error_envelope(const Error& error) {
  json details = json::object();
  for (const auto& [k, v] : error.details())
    std::visit([&, key = k](const auto& x) { details[key] = x; }, v);
  return {{"code", code_name(error.code())}, {"message", error.what()}, {"details", details}};
}

int http_status(Errc code) {
  switch (code) {
    case Errc::ValidationError:
    case Errc::InvalidAirportCode:
    case Errc::FutureDate:
    case Errc::TooLong:
    case Errc::InvalidReport:
    case Errc::UnknownReason:
    case Errc::ParseError:
    case Errc::DuplicateBenefitId:
    case Errc::NonPositiveCost:
    case Errc::RangeOutOfBounds:
    case Errc::InvalidEvent:
    case Errc::EmptyBatch:
      return 400;
    case Errc::Unauthorized:
      return 401;
    case Errc::ReadOnlyReplica:
    case Errc::NotAuthority:
      return 403;
    case Errc::NotFound:
    case Errc::UnknownUid:
    case Errc::UnknownBenefit:
      return 404;
    case Errc::DuplicatePassport:
    case Errc::IllegalTransition:
    case Errc::InsufficientBalance:
    case Errc::BenefitDisabled:
      return 409;
    case Errc::PeerUnreachable:
    case Errc::InvalidBlock:
      return 502;
    case Errc::StorageFailure:
      return 503;
    default:
      return 500;
  }
}

}  // namespace pl::node
