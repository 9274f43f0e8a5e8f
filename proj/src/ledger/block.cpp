#include "pl/ledger/block.hpp"

#include "pl/common/error.hpp"
#include "pl/ledger/merkle.hpp"
#include "pl/ledger/payloads.hpp"

namespace pl::ledger {
namespace {

constexpr std::string_view kSigningTag = "pl-block-v1";

void write_unhashed_prefix(Writer& w, const Block& b) {
  w.u64(b.height);
  w.fixed(b.prev_hash);
  w.u32(static_cast<std::uint32_t>(b.events.size()));
  for (const auto& e : b.events) w.bytes(encode_event(e));
  w.fixed(b.events_root);
  w.i64(b.timestamp);
  w.str(b.authority_id);
  w.fixed(b.signature);
}

}  // namespace

crypto::Digest compute_events_root(std::span<const Event> events) {
  std::vector<crypto::Digest> leaves;
  leaves.reserve(events.size());
  for (const auto& e : events) leaves.push_back(merkle_leaf(encode_event(e)));
  return merkle_root(leaves);
}

Bytes signing_message(const Block& b) {
  Writer w;
  w.raw(as_bytes(kSigningTag));
  w.u64(b.height);
  w.fixed(b.prev_hash);
  w.fixed(b.events_root);
  w.i64(b.timestamp);
  w.str(b.authority_id);
  return std::move(w).take();
}

crypto::Digest compute_block_hash(const Block& block) {
  Writer w;
  write_unhashed_prefix(w, block);
  return crypto::sha256(w.view());
}

void seal_block(Block& block, const crypto::SigningKey& key) {
  block.events_root = compute_events_root(block.events);
  block.signature = key.sign(signing_message(block));
  block.block_hash = compute_block_hash(block);
}

Bytes encode_block(const Block& block) {
  Writer w;
  write_unhashed_prefix(w, block);
  w.fixed(block.block_hash);
  return std::move(w).take();
}

Block decode_block(ByteView frame) {
  Reader r(frame);
  Block b;
  b.height = r.u64();
  b.prev_hash = r.fixed<32>();
  const auto n = r.u32();
  if (n > r.remaining()) throw DecodeError("event count exceeds frame");
  b.events.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) b.events.push_back(decode_event(r.bytes()));
  b.events_root = r.fixed<32>();
  b.timestamp = r.i64();
  b.authority_id = r.str();
  b.signature = r.fixed<64>();
  b.block_hash = r.fixed<32>();
  r.expect_end();
  return b;
}

std::string_view to_string(FailureClass kind) {
  switch (kind) {
    case FailureClass::HashMismatch: return "HashMismatch";
    case FailureClass::LinkBroken: return "LinkBroken";
    case FailureClass::BadSignature: return "BadSignature";
    case FailureClass::MalformedEvent: return "MalformedEvent";
  }
  return "?";
}

std::optional<BlockFault> check_block(const Block& block, Height expected_height,
                                      const crypto::Digest& expected_prev,
                                      const crypto::PublicKey& authority_key,
                                      std::unordered_set<EventId, EventIdHash>* seen_ids) {
  if (compute_block_hash(block) != block.block_hash)
    return BlockFault{FailureClass::HashMismatch, "block_hash does not match block contents"};
  if (block.height != expected_height)
    return BlockFault{FailureClass::LinkBroken, "unexpected height " +
                                                    std::to_string(block.height)};
  if (block.prev_hash != expected_prev)
    return BlockFault{FailureClass::LinkBroken, "prev_hash does not match preceding block"};
  if (compute_events_root(block.events) != block.events_root)
    return BlockFault{FailureClass::HashMismatch, "events_root does not match events"};
  if (!crypto::verify(authority_key, signing_message(block), block.signature))
    return BlockFault{FailureClass::BadSignature, "signature does not verify"};

  if (block.events.empty()) return BlockFault{FailureClass::MalformedEvent, "empty block"};
  Timestamp last = block.events.front().timestamp;
  std::unordered_set<EventId, EventIdHash> local;
  auto* ids = seen_ids ? seen_ids : &local;
  for (std::size_t i = 0; i < block.events.size(); ++i) {
    const auto& e = block.events[i];
    const auto where = "event " + std::to_string(i) + ": ";
    try {
      validate_event(e);
    } catch (const Error& err) {
      return BlockFault{FailureClass::MalformedEvent, where + err.what()};
    }
    if (e.timestamp < last)
      return BlockFault{FailureClass::MalformedEvent, where + "timestamp decreases"};
    last = e.timestamp;
    if (!ids->insert(e.id).second)
      return BlockFault{FailureClass::MalformedEvent, where + "duplicate event id"};
  }
  return std::nullopt;
}

}  // namespace pl::ledger
