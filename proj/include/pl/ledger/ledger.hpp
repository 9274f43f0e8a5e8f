#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_set>
#include <vector>

#include "pl/common/crypto.hpp"
#include "pl/ledger/block.hpp"

namespace pl::ledger {

struct ChainHead {
  Height height = 0;
  crypto::Digest block_hash{};
  friend bool operator==(const ChainHead&, const ChainHead&) = default;
};

struct VerificationFailure {
  Height height;
  FailureClass kind;
  std::string detail;
};

struct VerificationReport {
  Height from = 0;
  Height to = 0;
  std::uint64_t checked = 0;
  std::optional<VerificationFailure> failure;

  bool ok() const noexcept { return !failure; }
};

struct EventFilter {
  std::optional<EventKind> kind;
  std::optional<std::string> subject_uid;

  bool matches(const Event& e) const {
    return (!kind || e.kind == *kind) && (!subject_uid || e.subject_uid == subject_uid);
  }
};

struct LedgerOptions {
  crypto::PublicKey authority_key{};
  /// Present only on the authority node.
  std::optional<crypto::SigningKey> signer;
  std::string authority_id = "authority";
  std::size_t max_batch = 1000;
  bool fsync = true;
  std::function<Timestamp()> clock = system_now;
};

/// Append-only block store.
///
/// On disk: `chain.log` holds frames, each prefixed by a 4-byte big-endian
/// length; `chain.idx` holds one 16-byte record (u64 height, u64 offset of
/// the length prefix) per block. A block is durable once its index record
/// is written; on open, anything in the log past the last indexed frame is
/// a torn tail and is truncated.
///
/// Appends are serialized. Reads may run concurrently with an append and
/// observe either the old or the new head.
class Ledger {
 public:
  Ledger(const std::filesystem::path& dir, LedgerOptions options);
  ~Ledger();

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  /// Signs and persists a new block at head+1 (or the genesis block on an
  /// empty chain). Errors: NotAuthority, EmptyBatch, InvalidEvent,
  /// StorageFailure.
  Block append_block(std::vector<Event> events);

  /// Replica path: persists a block produced elsewhere after checking link,
  /// hash, signature and events. Errors: InvalidBlock, StorageFailure.
  void append_verified(const Block& block);

  /// Throws NotFound.
  Block get_block(Height height) const;
  /// Canonical frame bytes exactly as persisted (without length prefix).
  Bytes get_frame(Height height) const;

  std::optional<ChainHead> head() const;
  /// Number of persisted blocks.
  std::uint64_t size() const;

  /// Re-reads the persisted frames and checks every block in
  /// [from, to]. Reports the first failing height. Throws RangeOutOfBounds.
  VerificationReport verify_chain(Height from, Height to) const;
  /// verify_chain over the whole chain; an empty chain passes.
  VerificationReport verify_all() const;

  /// Visits events in (height, index) order.
  void for_each_event(const EventFilter& filter,
                      const std::function<void(const Event&, Height)>& visit) const;
  std::vector<Event> events(const EventFilter& filter = {}) const;

  bool has_event(const EventId& id) const;
  bool is_authority() const noexcept { return options_.signer.has_value(); }
  const crypto::PublicKey& authority_key() const noexcept { return options_.authority_key; }
  const std::string& authority_id() const noexcept { return options_.authority_id; }
  std::size_t max_batch() const noexcept { return options_.max_batch; }
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  struct IndexEntry {
    std::uint64_t offset;  // of the 4-byte length prefix
    std::uint32_t length;  // frame bytes after the prefix
    crypto::Digest block_hash;
  };

  void recover();
  void persist(const Block& block);
  Bytes read_frame(const IndexEntry& entry) const;
  IndexEntry entry_at(Height height) const;

  std::filesystem::path dir_;
  LedgerOptions options_;
  int log_fd_ = -1;
  int idx_fd_ = -1;

  std::mutex append_mu_;
  mutable std::shared_mutex index_mu_;
  std::vector<IndexEntry> index_;
  std::unordered_set<EventId, EventIdHash> event_ids_;
  std::uint64_t log_end_ = 0;
  Timestamp last_timestamp_ = 0;
};

}  // namespace pl::ledger
