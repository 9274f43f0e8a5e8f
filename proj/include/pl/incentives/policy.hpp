#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pl/common/crypto.hpp"

namespace pl {

struct IncentiveReason {
  std::string code;
  std::string description;
  friend bool operator==(const IncentiveReason&, const IncentiveReason&) = default;
};

struct Benefit {
  std::string benefit_id;
  std::uint64_t cost = 1;
  std::string description;
  bool enabled = true;
  friend bool operator==(const Benefit&, const Benefit&) = default;
};

/// Government-configured redemption rules.
///
/// Policy file, UTF-8, one entry per line, '#' comments:
///
///   benefit_id|cost|enabled(0/1)|description
///   @reason|CODE|description          (extra incentive reason codes)
///
/// VoluntaryTest and SelfQuarantine are always registered.
struct RedemptionPolicy {
  std::vector<Benefit> benefits;
  std::vector<IncentiveReason> reasons;
  /// SHA-256 of the exact document bytes; all-zero for the built-in default.
  crypto::Digest digest{};

  const Benefit* find_benefit(std::string_view id) const;
  bool has_reason(std::string_view code) const;
};

RedemptionPolicy default_policy();

/// Errors: ParseError (details.line), DuplicateBenefitId, NonPositiveCost.
RedemptionPolicy parse_policy(std::string_view document);

}  // namespace pl
