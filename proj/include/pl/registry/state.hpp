#pragma once

// The derived world state. Every field is a pure function of the chain's
// event stream; `apply_event` is the only mutator.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pl/common/crypto.hpp"
#include "pl/exposure/hotspot.hpp"
#include "pl/incentives/token_account.hpp"
#include "pl/ledger/block.hpp"
#include "pl/ledger/ledger.hpp"
#include "pl/registry/user_record.hpp"

namespace pl {

struct ChainConfig {
  std::optional<crypto::PublicKey> authority_key;
  std::optional<crypto::Digest> policy_digest;

  friend bool operator==(const ChainConfig&, const ChainConfig&) = default;
};

struct State {
  std::map<std::string, UserRecord> users;
  std::map<std::string, std::string> passport_to_uid;
  std::map<std::string, TokenAccount> accounts;
  std::vector<StoredHotspot> hotspots;  // ingestion order
  /// airport -> (case day -> index into hotspots)
  std::map<std::string, std::multimap<std::int32_t, std::size_t>> hotspots_by_airport;
  ChainConfig config;
  std::uint64_t events_applied = 0;
  std::optional<ledger::Height> height;  // last block applied

  const UserRecord* find_uid(std::string_view uid) const;
  const UserRecord* find_passport(std::string_view passport) const;

  /// Canonical byte form, used to compare replays.
  Bytes serialize() const;

  friend bool operator==(const State&, const State&) = default;
};

/// Throws Error{ReplayConflict} (with the offending event id) when the event
/// violates a registry, token or band invariant.
void apply_event(State& state, const ledger::Event& event);
void apply_block(State& state, const ledger::Block& block);

/// Verifies the chain, then folds every event. Throws ChainInvalid or
/// ReplayConflict.
State replay(const ledger::Ledger& ledger);

}  // namespace pl
