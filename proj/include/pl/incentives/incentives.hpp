#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "pl/incentives/policy.hpp"
#include "pl/incentives/token_account.hpp"
#include "pl/registry/engine.hpp"
#include "pl/registry/user_record.hpp"

namespace pl {

inline constexpr std::uint64_t kMaxIssueAmount = 1'000'000'000;

struct RedemptionReceipt {
  std::string uid;
  std::string benefit_id;
  std::uint64_t cost = 0;
  std::uint64_t remaining_balance = 0;
  ledger::Height block_height = 0;
};

/// How a volunteer is identified when they come forward.
struct VolunteerRef {
  std::optional<std::string> uid;
  std::optional<std::string> passport;
  /// Used only when a new record has to be created.
  std::string location;
  std::string info;
};

struct VolunteerOutcome {
  UserRecord user;
  TokenAccount account;
  bool created = false;
  ledger::Height block_height = 0;
};

/// Incentive tokens: authority issuance for cooperative actions, balances on
/// chain, redemption against the active policy. Tokens are not transferable.
class Incentives {
 public:
  explicit Incentives(Engine& engine, RedemptionPolicy policy = default_policy());

  /// Activates a new policy and records its digest on chain when it differs
  /// from the last recorded one.
  RedemptionPolicy load_policy(std::string_view document);
  RedemptionPolicy policy() const;

  /// Errors: UnknownUid, UnknownReason, ValidationError (amount), NotAuthority.
  Recorded<TokenAccount> issue_token(const std::string& uid, const std::string& reason_code,
                                     std::uint64_t amount = 1);

  /// Errors: UnknownUid, UnknownBenefit, BenefitDisabled, InsufficientBalance.
  /// A rejected redemption appends nothing.
  RedemptionReceipt redeem_tokens(const std::string& uid, const std::string& benefit_id);

  /// Resolve-or-register the volunteer, then issue one token; both events go
  /// into the same block.
  VolunteerOutcome run_volunteer_flow(const VolunteerRef& who, const std::string& reason_code);

  /// Throws UnknownUid.
  TokenAccount account(const std::string& uid) const;

 private:
  void require_reason(const RedemptionPolicy& policy, const std::string& code) const;

  Engine& engine_;
  mutable std::mutex policy_mu_;
  RedemptionPolicy policy_;
};

}  // namespace pl
