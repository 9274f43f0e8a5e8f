#include "pl/incentives/incentives.hpp"

#include "pl/common/text.hpp"
#include "pl/registry/registry.hpp"

namespace pl {

using namespace ledger;

Incentives::Incentives(Engine& engine, RedemptionPolicy policy)
    : engine_(engine), policy_(std::move(policy)) {}

RedemptionPolicy Incentives::policy() const {
  std::lock_guard lock(policy_mu_);
  return policy_;
}

RedemptionPolicy Incentives::load_policy(std::string_view document) {
  auto parsed = parse_policy(document);
  if (engine_.ledger().is_authority()) {
    engine_.transact(
        [&](Tx& tx) {
          if (tx.state().config.policy_digest == parsed.digest) return;
          tx.emit(std::nullopt,
                  ConfigPayload{std::string(config_keys::kPolicyDigest),
                                Bytes(parsed.digest.begin(), parsed.digest.end())});
        },
        [](const State&) { return 0; });
  }
  std::lock_guard lock(policy_mu_);
  policy_ = parsed;
  return parsed;
}

void Incentives::require_reason(const RedemptionPolicy& policy, const std::string& code) const {
  if (!policy.has_reason(code))
    throw Error(Errc::UnknownReason, "incentive reason " + code + " is not registered",
                {{"reason", code}});
}

Recorded<TokenAccount> Incentives::issue_token(const std::string& uid,
                                               const std::string& reason_code,
                                               std::uint64_t amount) {
  const auto active = policy();
  auto [acct, height] = engine_.transact(
      [&](Tx& tx) {
        registry::require_user(tx.state(), uid);
        require_reason(active, reason_code);
        if (amount < 1 || amount > kMaxIssueAmount)
          throw Error(Errc::ValidationError,
                      "amount must be between 1 and " + std::to_string(kMaxIssueAmount),
                      {{"field", std::string("amount")}});
        tx.emit(uid, TokenIssuePayload{reason_code, amount});
      },
      [&](const State& s) { return s.accounts.at(uid); });
  return {std::move(acct), height.value_or(0)};
}

RedemptionReceipt Incentives::redeem_tokens(const std::string& uid,
                                            const std::string& benefit_id) {
  const auto active = policy();
  std::uint64_t cost = 0;
  auto [remaining, height] = engine_.transact(
      [&](Tx& tx) {
        registry::require_user(tx.state(), uid);
        const auto* benefit = active.find_benefit(benefit_id);
        if (!benefit)
          throw Error(Errc::UnknownBenefit, "unknown benefit " + benefit_id,
                      {{"benefit_id", benefit_id}});
        if (!benefit->enabled)
          throw Error(Errc::BenefitDisabled, "benefit " + benefit_id + " is disabled",
                      {{"benefit_id", benefit_id}});
        const auto balance = tx.state().accounts.at(uid).balance;
        if (balance < benefit->cost)
          throw Error(Errc::InsufficientBalance,
                      "balance " + std::to_string(balance) + " is below cost " +
                          std::to_string(benefit->cost),
                      {{"balance", static_cast<std::int64_t>(balance)},
                       {"cost", static_cast<std::int64_t>(benefit->cost)}});
        cost = benefit->cost;
        tx.emit(uid, TokenRedeemPayload{benefit_id, cost});
      },
      [&](const State& s) { return s.accounts.at(uid).balance; });
  return {uid, benefit_id, cost, remaining, height.value_or(0)};
}

VolunteerOutcome Incentives::run_volunteer_flow(const VolunteerRef& who,
                                                const std::string& reason_code) {
  const auto active = policy();
  std::string uid;
  bool created = false;
  auto [outcome, height] = engine_.transact(
      [&](Tx& tx) {
        require_reason(active, reason_code);
        const auto& state = tx.state();
        // Step 2: existing uid continues, otherwise one is assigned.
        if (who.uid) {
          uid = registry::require_user(state, trim(*who.uid)).uid;
        } else if (const auto passport = registry::normalize_passport(who.passport);
                   passport && state.find_passport(*passport)) {
          uid = state.find_passport(*passport)->uid;
        } else {
          uid = registry::emit_register(tx, who.passport, who.location, who.info);
          created = true;
        }
        // Steps 3-4: one token, recorded with the registration (if any).
        tx.emit(uid, TokenIssuePayload{reason_code, 1});
      },
      [&](const State& s) {
        return VolunteerOutcome{*s.find_uid(uid), s.accounts.at(uid), false, 0};
      });
  outcome.created = created;
  outcome.block_height = height.value_or(0);
  return outcome;
}

TokenAccount Incentives::account(const std::string& uid) const {
  return engine_.read([&](const State& s) {
    registry::require_user(s, uid);
    return s.accounts.at(uid);
  });
}

}  // namespace pl
