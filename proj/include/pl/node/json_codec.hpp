#pragma once

#include <json.hpp>

#include "pl/common/error.hpp"
#include "pl/exposure/exposure.hpp"
#include "pl/incentives/incentives.hpp"
#include "pl/ledger/block.hpp"
#include "pl/ledger/ledger.hpp"
#include "pl/registry/user_record.hpp"

namespace pl::node {

using nlohmann::json;

/// Minimal-disclosure answer for gatekeepers.
struct VerifyResponse {
  std::string uid;
  ColourBand band = ColourBand::Green;
  std::string band_reason;
  ledger::Height as_of_block = 0;
  crypto::Digest chain_head_hash{};
};

json to_json(const UserRecord& user);
json to_json(const TravelVisit& visit);
json to_json(const TokenAccount& account);
json to_json(const RedemptionReceipt& receipt);
json to_json(const SuspicionFinding& finding);
json to_json(const RedemptionPolicy& policy);
json to_json(const VerifyResponse& response);
json to_json(const ledger::VerificationReport& report);
json to_json(const ledger::Event& event);
/// Block header fields, signature validity against `key`, decoded events.
json to_json(const ledger::Block& block, const crypto::PublicKey& key);

/// `{ "code": ..., "message": ..., "details": {...} }`
json error_envelope(const Error& error);
int http_status(Errc code);

}  // namespace pl::node
