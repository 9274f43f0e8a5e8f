#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "pl/common/crypto.hpp"
#include "pl/ledger/event.hpp"

namespace pl::ledger {

using Height = std::uint64_t;

/// A signed, hash-linked batch of events.
///
/// Frame layout (the bytes hashed into block_hash are everything before the
/// trailing block_hash field):
///
///   u64 height | prev_hash[32] | u32 n | n x bytes(event) |
///   events_root[32] | i64 timestamp | str authority_id |
///   signature[64] | block_hash[32]
///
/// The signature covers a domain-tagged encoding of
/// (height, prev_hash, events_root, timestamp, authority_id).
struct Block {
  Height height = 0;
  crypto::Digest prev_hash{};
  std::vector<Event> events;
  crypto::Digest events_root{};
  Timestamp timestamp = 0;
  std::string authority_id;
  crypto::Signature signature{};
  crypto::Digest block_hash{};

  friend bool operator==(const Block&, const Block&) = default;
};

crypto::Digest compute_events_root(std::span<const Event> events);
Bytes signing_message(const Block& block);
/// Hash over every field preceding block_hash in the frame.
crypto::Digest compute_block_hash(const Block& block);

/// Fills events_root, signature and block_hash.
void seal_block(Block& block, const crypto::SigningKey& key);

Bytes encode_block(const Block& block);
/// Structural decode. Throws DecodeError.
Block decode_block(ByteView frame);

enum class FailureClass { HashMismatch, LinkBroken, BadSignature, MalformedEvent };
std::string_view to_string(FailureClass kind);

struct BlockFault {
  FailureClass kind;
  std::string detail;
};

/// Full per-block check: recomputed hash, expected height and link, events
/// root, authority signature, and event well-formedness. `seen_ids`, when
/// given, enforces event-id uniqueness and is extended with this block's ids.
std::optional<BlockFault> check_block(
    const Block& block, Height expected_height, const crypto::Digest& expected_prev,
    const crypto::PublicKey& authority_key,
    std::unordered_set<EventId, EventIdHash>* seen_ids = nullptr);

}  // namespace pl::ledger
