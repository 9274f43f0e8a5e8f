#pragma once

#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pl/exposure/hotspot.hpp"
#include "pl/registry/engine.hpp"

namespace pl {

inline constexpr std::string_view kExposureReason = "airport exposure";

/// Every (visit, report) pair at the same airport with
/// |case_date - visit_date| <= 14 days, boundaries included. Ordered by
/// visit (history order), then case date, then ingestion order.
std::vector<SuspicionFinding> find_exposures(const State& state, const UserRecord& user);

/// Throws InvalidReport.
void validate_report(const HotspotReport& report);

struct HotspotAck {
  std::string event_id;  // hex
  ledger::Height block_height = 0;
};

struct ImportResult {
  std::size_t accepted = 0;
  std::optional<ledger::Height> last_block_height;
};

struct SweepSummary {
  std::size_t evaluated = 0;
  std::vector<std::string> newly_flagged;
  std::size_t hotspot_reports = 0;
  std::optional<ledger::Height> block_height;
};

class Exposure {
 public:
  explicit Exposure(Engine& engine) : engine_(engine) {}

  HotspotAck ingest_hotspot(const HotspotReport& report);
  /// Appends the reports in order; blocks hold at most max_batch of them.
  /// Every report must already be valid.
  ImportResult ingest_batch(std::span<const HotspotReport> reports);

  /// Pure read. Throws UnknownUid.
  std::vector<SuspicionFinding> evaluate_user(const std::string& uid) const;

  /// Moves every Green user with at least one finding to Amber. Runs one
  /// sweep at a time.
  SweepSummary sweep_and_flag();

  std::size_t hotspot_count() const;

 private:
  Engine& engine_;
  std::mutex sweep_mu_;
};

}  // namespace pl
