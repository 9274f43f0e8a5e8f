#include "pl/ledger/ledger.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "pl/common/error.hpp"
#include "pl/ledger/payloads.hpp"

namespace pl::ledger {
namespace {

constexpr std::size_t kIndexRecord = 16;
constexpr std::uint32_t kMaxFrame = 256u << 20;

[[noreturn]] void storage_failure(const std::string& what) {
  throw Error(Errc::StorageFailure, what + ": " + std::strerror(errno));
}

int open_file(const std::filesystem::path& path) {
  int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) storage_failure("open " + path.string());
  return fd;
}

std::uint64_t file_size(int fd) {
  struct stat st {};
  if (::fstat(fd, &st) != 0) storage_failure("fstat");
  return static_cast<std::uint64_t>(st.st_size);
}

bool pread_all(int fd, std::uint8_t* buf, std::size_t len, std::uint64_t offset) {
  while (len > 0) {
    auto n = ::pread(fd, buf, len, static_cast<off_t>(offset));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buf += n;
    len -= static_cast<std::size_t>(n);
    offset += static_cast<std::uint64_t>(n);
  }
  return true;
}

bool pwrite_all(int fd, const std::uint8_t* buf, std::size_t len, std::uint64_t offset) {
  while (len > 0) {
    auto n = ::pwrite(fd, buf, len, static_cast<off_t>(offset));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buf += n;
    len -= static_cast<std::size_t>(n);
    offset += static_cast<std::uint64_t>(n);
  }
  return true;
}

std::uint64_t load_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t load_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         p[3];
}

void store_be64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 7; i >= 0; --i, v >>= 8) p[i] = static_cast<std::uint8_t>(v);
}

void store_be32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 3; i >= 0; --i, v >>= 8) p[i] = static_cast<std::uint8_t>(v);
}

}  // namespace

Ledger::Ledger(const std::filesystem::path& dir, LedgerOptions options)
    : dir_(dir), options_(std::move(options)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir_.string() + ": " + ec.message());
  log_fd_ = open_file(dir_ / "chain.log");
  idx_fd_ = open_file(dir_ / "chain.idx");
  try {
    recover();
  } catch (...) {
    ::close(log_fd_);
    ::close(idx_fd_);
    throw;
  }
}

Ledger::~Ledger() {
  if (log_fd_ >= 0) ::close(log_fd_);
  if (idx_fd_ >= 0) ::close(idx_fd_);
}

void Ledger::recover() {
  auto idx_size = file_size(idx_fd_);
  if (idx_size % kIndexRecord != 0) {
    idx_size -= idx_size % kIndexRecord;
    if (::ftruncate(idx_fd_, static_cast<off_t>(idx_size)) != 0) storage_failure("truncate index");
  }
  const auto log_size = file_size(log_fd_);
  const auto count = idx_size / kIndexRecord;

  std::uint64_t expected_offset = 0;
  for (std::uint64_t h = 0; h < count; ++h) {
    std::uint8_t rec[kIndexRecord];
    if (!pread_all(idx_fd_, rec, sizeof rec, h * kIndexRecord)) storage_failure("read index");
    const auto height = load_be64(rec);
    const auto offset = load_be64(rec + 8);
    if (height != h || offset != expected_offset)
      throw Error(Errc::CorruptStore, "index record " + std::to_string(h) + " is inconsistent");
    std::uint8_t prefix[4];
    if (offset + 4 > log_size || !pread_all(log_fd_, prefix, 4, offset))
      throw Error(Errc::CorruptStore, "log ends before indexed block " + std::to_string(h));
    const auto length = load_be32(prefix);
    if (offset + 4 + length > log_size)
      throw Error(Errc::CorruptStore, "indexed block " + std::to_string(h) + " is truncated");
    index_.push_back(IndexEntry{offset, length, {}});
    expected_offset = offset + 4 + length;
  }

  // Frames written but never indexed were never acknowledged.
  if (log_size > expected_offset &&
      ::ftruncate(log_fd_, static_cast<off_t>(expected_offset)) != 0)
    storage_failure("truncate torn tail");
  log_end_ = expected_offset;

  // Undecodable frames are left for verify_chain to report.
  for (auto& entry : index_) {
    try {
      auto block = decode_block(read_frame(entry));
      entry.block_hash = block.block_hash;
      for (const auto& e : block.events) event_ids_.insert(e.id);
      last_timestamp_ = std::max(last_timestamp_, block.timestamp);
    } catch (const DecodeError&) {
    }
  }
}

Bytes Ledger::read_frame(const IndexEntry& entry) const {
  std::uint8_t prefix[4];
  if (!pread_all(log_fd_, prefix, 4, entry.offset)) throw DecodeError("cannot read frame prefix");
  const auto length = load_be32(prefix);
  if (length != entry.length) throw DecodeError("frame length prefix does not match index");
  Bytes frame(length);
  if (!pread_all(log_fd_, frame.data(), length, entry.offset + 4))
    throw DecodeError("cannot read frame");
  return frame;
}

Ledger::IndexEntry Ledger::entry_at(Height height) const {
  std::shared_lock lock(index_mu_);
  if (height >= index_.size())
    throw Error(Errc::NotFound, "no block at height " + std::to_string(height),
                {{"height", static_cast<std::int64_t>(height)}});
  return index_[height];
}

void Ledger::persist(const Block& block) {
  auto frame = encode_block(block);
  if (frame.size() > kMaxFrame)
    throw Error(Errc::InvalidEvent, "block frame exceeds maximum size");
  Bytes record(4 + frame.size());
  store_be32(record.data(), static_cast<std::uint32_t>(frame.size()));
  std::copy(frame.begin(), frame.end(), record.begin() + 4);

  std::uint64_t idx_offset;
  {
    std::shared_lock lock(index_mu_);
    idx_offset = index_.size() * kIndexRecord;
  }
  std::uint8_t idx_rec[kIndexRecord];
  store_be64(idx_rec, block.height);
  store_be64(idx_rec + 8, log_end_);

  auto rollback = [&](const char* what) {
    const int saved = errno;
    [[maybe_unused]] auto a = ::ftruncate(log_fd_, static_cast<off_t>(log_end_));
    [[maybe_unused]] auto b = ::ftruncate(idx_fd_, static_cast<off_t>(idx_offset));
    errno = saved;
    storage_failure(what);
  };
  if (!pwrite_all(log_fd_, record.data(), record.size(), log_end_)) rollback("write chain.log");
  if (options_.fsync && ::fdatasync(log_fd_) != 0) rollback("sync chain.log");
  if (!pwrite_all(idx_fd_, idx_rec, sizeof idx_rec, idx_offset)) rollback("write chain.idx");
  if (options_.fsync && ::fdatasync(idx_fd_) != 0) rollback("sync chain.idx");

  std::unique_lock lock(index_mu_);
  index_.push_back(IndexEntry{log_end_, static_cast<std::uint32_t>(frame.size()),
                              block.block_hash});
  for (const auto& e : block.events) event_ids_.insert(e.id);
  log_end_ += record.size();
  last_timestamp_ = std::max(last_timestamp_, block.timestamp);
}

Block Ledger::append_block(std::vector<Event> events) {
  std::lock_guard guard(append_mu_);
  if (!options_.signer) throw Error(Errc::NotAuthority, "node does not hold the signing key");
  if (events.empty()) throw Error(Errc::EmptyBatch, "a block needs at least one event");
  if (events.size() > options_.max_batch)
    throw Error(Errc::InvalidEvent, "batch exceeds max_batch",
                {{"reason", std::string("batch too large")},
                 {"max_batch", static_cast<std::int64_t>(options_.max_batch)}});

  std::unordered_set<EventId, EventIdHash> batch_ids;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    validate_event(e);
    const auto kind = std::string(to_string(e.kind));
    if (i > 0 && e.timestamp < events[i - 1].timestamp)
      throw Error(Errc::InvalidEvent, "event timestamps decrease within the batch",
                  {{"kind", kind}, {"reason", std::string("timestamp decreases")}});
    if (!batch_ids.insert(e.id).second || has_event(e.id))
      throw Error(Errc::InvalidEvent, "duplicate event id",
                  {{"kind", kind}, {"reason", std::string("duplicate event id")}});
  }

  Block block;
  {
    std::shared_lock lock(index_mu_);
    block.height = index_.size();
    if (!index_.empty()) block.prev_hash = index_.back().block_hash;
    block.timestamp = std::max({options_.clock(), last_timestamp_, events.back().timestamp});
  }
  block.events = std::move(events);
  block.authority_id = options_.authority_id;
  seal_block(block, *options_.signer);
  persist(block);
  return block;
}

void Ledger::append_verified(const Block& block) {
  std::lock_guard guard(append_mu_);
  Height expected;
  crypto::Digest prev{};
  {
    std::shared_lock lock(index_mu_);
    expected = index_.size();
    if (!index_.empty()) prev = index_.back().block_hash;
  }
  auto reject = [&](const std::string& why) {
    throw Error(Errc::InvalidBlock, "block " + std::to_string(block.height) + ": " + why,
                {{"height", static_cast<std::int64_t>(block.height)}, {"reason", why}});
  };
  if (auto fault = check_block(block, expected, prev, options_.authority_key))
    reject(std::string(to_string(fault->kind)) + ": " + fault->detail);
  for (const auto& e : block.events)
    if (has_event(e.id)) reject("event id already on chain");
  persist(block);
}

Block Ledger::get_block(Height height) const {
  const auto entry = entry_at(height);
  try {
    return decode_block(read_frame(entry));
  } catch (const DecodeError& e) {
    throw Error(Errc::CorruptStore,
                "block " + std::to_string(height) + " is unreadable: " + e.what());
  }
}

Bytes Ledger::get_frame(Height height) const {
  const auto entry = entry_at(height);
  try {
    return read_frame(entry);
  } catch (const DecodeError& e) {
    throw Error(Errc::CorruptStore,
                "block " + std::to_string(height) + " is unreadable: " + e.what());
  }
}

std::optional<ChainHead> Ledger::head() const {
  std::shared_lock lock(index_mu_);
  if (index_.empty()) return std::nullopt;
  return ChainHead{index_.size() - 1, index_.back().block_hash};
}

std::uint64_t Ledger::size() const {
  std::shared_lock lock(index_mu_);
  return index_.size();
}

bool Ledger::has_event(const EventId& id) const {
  std::shared_lock lock(index_mu_);
  return event_ids_.contains(id);
}

VerificationReport Ledger::verify_chain(Height from, Height to) const {
  std::vector<IndexEntry> entries;
  {
    std::shared_lock lock(index_mu_);
    if (from > to || to >= index_.size())
      throw Error(Errc::RangeOutOfBounds,
                  "verify range [" + std::to_string(from) + ", " + std::to_string(to) +
                      "] outside chain of " + std::to_string(index_.size()) + " blocks",
                  {{"from", static_cast<std::int64_t>(from)},
                   {"to", static_cast<std::int64_t>(to)}});
    entries.assign(index_.begin(), index_.begin() + static_cast<std::ptrdiff_t>(to + 1));
  }

  VerificationReport report{from, to, 0, std::nullopt};
  auto fail = [&](Height h, FailureClass kind, std::string detail) {
    report.failure = VerificationFailure{h, kind, std::move(detail)};
    return report;
  };

  crypto::Digest prev{};
  if (from > 0) {
    try {
      prev = compute_block_hash(decode_block(read_frame(entries[from - 1])));
    } catch (const DecodeError& e) {
      return fail(from, FailureClass::LinkBroken,
                  std::string("preceding block unreadable: ") + e.what());
    }
  }

  std::unordered_set<EventId, EventIdHash> seen;
  for (Height h = from; h <= to; ++h) {
    Block block;
    try {
      block = decode_block(read_frame(entries[h]));
    } catch (const DecodeError& e) {
      return fail(h, FailureClass::MalformedEvent, std::string("frame: ") + e.what());
    }
    if (auto fault = check_block(block, h, prev, options_.authority_key, &seen))
      return fail(h, fault->kind, fault->detail);
    prev = block.block_hash;
    ++report.checked;
  }
  return report;
}

VerificationReport Ledger::verify_all() const {
  const auto n = size();
  if (n == 0) return {};
  return verify_chain(0, n - 1);
}

void Ledger::for_each_event(const EventFilter& filter,
                            const std::function<void(const Event&, Height)>& visit) const {
  const auto n = size();
  for (Height h = 0; h < n; ++h) {
    const auto block = get_block(h);
    for (const auto& e : block.events)
      if (filter.matches(e)) visit(e, h);
  }
}

std::vector<Event> Ledger::events(const EventFilter& filter) const {
  std::vector<Event> out;
  for_each_event(filter, [&](const Event& e, Height) { out.push_back(e); });
  return out;
}

}  // namespace pl::ledger
