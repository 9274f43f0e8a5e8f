#include "pl/exposure/exposure.hpp"

#include "pl/common/text.hpp"
#include "pl/registry/registry.hpp"

namespace pl {

using namespace ledger;

std::vector<SuspicionFinding> find_exposures(const State& state, const UserRecord& user) {
  std::vector<SuspicionFinding> out;
  for (const auto& visit : user.travel_history) {
    auto airport = state.hotspots_by_airport.find(visit.airport_code);
    if (airport == state.hotspots_by_airport.end()) continue;
    const auto& by_day = airport->second;
    const auto lo = by_day.lower_bound(visit.visit_date.days() - kSuspicionWindowDays);
    const auto hi = by_day.upper_bound(visit.visit_date.days() + kSuspicionWindowDays);
    for (auto it = lo; it != hi; ++it) {
      const auto& stored = state.hotspots[it->second];
      out.push_back(SuspicionFinding{user.uid, visit, stored,
                                     stored.report.case_date - visit.visit_date});
    }
  }
  return out;
}

void validate_report(const HotspotReport& report) {
  auto invalid = [](const std::string& why, const std::string& field) {
    throw Error(Errc::InvalidReport, why, {{"field", field}});
  };
  if (!is_airport_code(report.airport_code))
    invalid("airport code must be three uppercase letters", "airport_code");
  if (report.case_count < 1) invalid("case_count must be at least 1", "case_count");
  if (report.source.size() > limits::kSourceBytes || !is_valid_utf8(report.source))
    invalid("source must be UTF-8 of at most 256 bytes", "source");
}

namespace {

HotspotIngestPayload to_payload(const HotspotReport& r) {
  return {r.airport_code, r.case_date, r.case_count, r.source};
}

}  // namespace

HotspotAck Exposure::ingest_hotspot(const HotspotReport& report) {
  validate_report(report);
  std::string id;
  auto [_, height] = engine_.transact(
      [&](Tx& tx) { id = crypto::to_hex(tx.emit(std::nullopt, to_payload(report)).id); },
      [](const State&) { return 0; });
  return {id, height.value_or(0)};
}

ImportResult Exposure::ingest_batch(std::span<const HotspotReport> reports) {
  for (const auto& r : reports) validate_report(r);
  ImportResult result;
  const auto chunk = engine_.ledger().max_batch();
  for (std::size_t begin = 0; begin < reports.size(); begin += chunk) {
    const auto end = std::min(reports.size(), begin + chunk);
    auto [_, height] = engine_.transact(
        [&](Tx& tx) {
          for (auto i = begin; i < end; ++i) tx.emit(std::nullopt, to_payload(reports[i]));
        },
        [](const State&) { return 0; });
    result.accepted += end - begin;
    result.last_block_height = height;
  }
  return result;
}

std::vector<SuspicionFinding> Exposure::evaluate_user(const std::string& uid) const {
  return engine_.read([&](const State& s) {
    return find_exposures(s, registry::require_user(s, uid));
  });
}

std::size_t Exposure::hotspot_count() const {
  return engine_.read([](const State& s) { return s.hotspots.size(); });
}

SweepSummary Exposure::sweep_and_flag() {
  std::lock_guard exclusive(sweep_mu_);
  SweepSummary summary;
  auto [flagged, height] = engine_.transact(
      [&](Tx& tx) {
        const auto& state = tx.state();
        summary.evaluated = state.users.size();
        summary.hotspot_reports = state.hotspots.size();
        for (const auto& [uid, user] : state.users) {
          if (user.band != ColourBand::Green) continue;
          const auto findings = find_exposures(state, user);
          if (findings.empty()) continue;
          std::vector<std::string> refs;
          refs.reserve(findings.size());
          for (const auto& f : findings) refs.push_back(crypto::to_hex(f.report.event_id));
          registry::emit_band_update(tx, user, ColourBand::Amber, std::string(kExposureReason),
                                     false, std::move(refs));
          summary.newly_flagged.push_back(uid);
        }
      },
      [](const State&) { return 0; });
  summary.block_height = height;
  return summary;
}

}  // namespace pl
