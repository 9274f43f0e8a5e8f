#include "pl/registry/engine.hpp"

#include <algorithm>

namespace pl {
namespace {

constexpr char kBase32[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";

}  // namespace

std::string Tx::new_uid() {
  for (;;) {
    auto bits = engine_.rng_() & ((std::uint64_t{1} << 60) - 1);
    std::string uid = engine_.options_.uid_prefix + "-";
    for (int i = 11; i >= 0; --i) uid.push_back(kBase32[(bits >> (5 * i)) & 31]);
    if (state_.find_uid(uid) ||
        std::find(issued_uids_.begin(), issued_uids_.end(), uid) != issued_uids_.end())
      continue;
    issued_uids_.push_back(uid);
    return uid;
  }
}

const ledger::Event& Tx::emit(std::optional<std::string> subject, const ledger::Payload& payload) {
  events_.push_back(ledger::make_event(engine_.new_event_id(), std::move(subject), payload, now_));
  return events_.back();
}

Engine::Engine(ledger::Ledger& ledger, EngineOptions options)
    : ledger_(ledger), options_(std::move(options)) {
  if (options_.seed) {
    rng_.seed(*options_.seed);
  } else {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd()};
    rng_.seed(seq);
  }
  state_ = replay(ledger_);
  if (auto head = ledger_.head()) last_timestamp_ = ledger_.get_block(head->height).timestamp;
  append_ = [this](std::vector<ledger::Event> events) {
    return ledger_.append_block(std::move(events));
  };
  if (ledger_.is_authority()) committer_ = std::thread([this] { committer_loop(); });
}

Engine::~Engine() {
  {
    std::lock_guard lock(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (committer_.joinable()) committer_.join();
}

State Engine::snapshot() const {
  std::shared_lock lock(state_mu_);
  return state_;
}

ledger::EventId Engine::new_event_id() {
  for (;;) {
    ledger::EventId id{};
    const auto a = rng_(), b = rng_();
    for (int i = 0; i < 8; ++i) {
      id[i] = static_cast<std::uint8_t>(a >> (8 * i));
      id[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
    }
    if (!ledger_.has_event(id)) return id;
  }
}

Timestamp Engine::next_timestamp() {
  last_timestamp_ = std::max(last_timestamp_, options_.clock());
  return last_timestamp_;
}

void Engine::set_append_fn(AppendFn fn) {
  std::lock_guard lock(queue_mu_);
  append_ = std::move(fn);
}

void Engine::prepare_write() {
  if (!ledger_.is_authority()) throw Error(Errc::NotAuthority, "node does not hold the signing key");
  bool faulted;
  {
    std::lock_guard lock(queue_mu_);
    faulted = faulted_;
  }
  if (faulted) {
    drain();
    rebuild_locked();
  }
}

void Engine::rebuild_locked() {
  auto fresh = replay(ledger_);
  {
    std::unique_lock lock(state_mu_);
    state_ = std::move(fresh);
  }
  std::lock_guard lock(queue_mu_);
  faulted_ = false;
}

void Engine::apply_locked(const std::vector<ledger::Event>& events) {
  std::unique_lock lock(state_mu_);
  try {
    for (const auto& e : events) apply_event(state_, e);
  } catch (const Error& e) {
    // Builder let through an event the state rejects; the state now holds a
    // partial transaction and must be rebuilt before the next write.
    {
      std::lock_guard qlock(queue_mu_);
      faulted_ = true;
    }
    throw Error(Errc::Internal, std::string("transaction rejected by state: ") + e.what());
  }
}

std::vector<std::future<ledger::Height>> Engine::submit(std::vector<ledger::Event> events) {
  const auto max_batch = ledger_.max_batch();
  std::vector<std::future<ledger::Height>> futures;
  std::lock_guard lock(queue_mu_);
  if (faulted_) throw Error(Errc::StorageFailure, "writer faulted; retry the operation");
  for (std::size_t begin = 0; begin < events.size(); begin += max_batch) {
    const auto end = std::min(events.size(), begin + max_batch);
    Unit unit;
    unit.events.assign(std::make_move_iterator(events.begin() + static_cast<std::ptrdiff_t>(begin)),
                       std::make_move_iterator(events.begin() + static_cast<std::ptrdiff_t>(end)));
    futures.push_back(unit.done.get_future());
    queue_.push_back(std::move(unit));
  }
  queue_cv_.notify_one();
  return futures;
}

ledger::Height Engine::await(std::vector<std::future<ledger::Height>>& pending) {
  ledger::Height last = 0;
  for (auto& f : pending) last = f.get();
  return last;
}

void Engine::committer_loop() {
  const auto max_batch = ledger_.max_batch();
  std::unique_lock lock(queue_mu_);
  for (;;) {
    queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) break;  // stopping and drained

    if (options_.batch_linger.count() > 0 && !stopping_) {
      const auto deadline = std::chrono::steady_clock::now() + options_.batch_linger;
      queue_cv_.wait_until(lock, deadline, [&] {
        std::size_t pending = 0;
        for (const auto& u : queue_) pending += u.events.size();
        return stopping_ || pending >= max_batch;
      });
    }

    std::vector<Unit> batch;
    std::vector<ledger::Event> events;
    while (!queue_.empty() &&
           (batch.empty() || events.size() + queue_.front().events.size() <= max_batch)) {
      auto& front = queue_.front();
      events.insert(events.end(), front.events.begin(), front.events.end());
      batch.push_back(std::move(front));
      queue_.pop_front();
    }
    busy_ = true;
    auto append = append_;
    lock.unlock();

    std::exception_ptr failure;
    ledger::Height height = 0;
    try {
      height = append(std::move(events)).height;
      std::unique_lock state_lock(state_mu_);
      state_.height = height;
    } catch (...) {
      failure = std::current_exception();
    }

    lock.lock();
    busy_ = false;
    if (failure) {
      faulted_ = true;
      for (auto& u : batch) u.done.set_exception(failure);
      const auto queued_failure = std::make_exception_ptr(
          Error(Errc::StorageFailure, "an earlier block failed to commit; retry the operation"));
      for (auto& u : queue_) u.done.set_exception(queued_failure);
      queue_.clear();
    } else {
      for (auto& u : batch) u.done.set_value(height);
    }
    idle_cv_.notify_all();
  }
}

void Engine::drain() {
  std::unique_lock lock(queue_mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

ledger::Height Engine::commit_raw(std::vector<ledger::Event> events) {
  std::unique_lock writer(write_mu_);
  prepare_write();
  drain();
  auto block = ledger_.append_block(std::move(events));
  std::unique_lock lock(state_mu_);
  apply_block(state_, block);
  last_timestamp_ = std::max(last_timestamp_, block.timestamp);
  return block.height;
}

std::size_t Engine::ingest_replicated(std::span<const ledger::Block> blocks) {
  std::unique_lock writer(write_mu_);
  if (blocks.empty()) return 0;
  State scratch = snapshot();
  std::size_t persisted = 0;
  bool scratch_dirty = false;

  auto publish = [&] {
    if (scratch_dirty) {
      auto fresh = replay(ledger_);
      std::unique_lock lock(state_mu_);
      state_ = std::move(fresh);
    } else {
      std::unique_lock lock(state_mu_);
      state_ = std::move(scratch);
    }
  };

  try {
    for (const auto& block : blocks) {
      const auto head = ledger_.head();
      const ledger::Height expected = head ? head->height + 1 : 0;
      const crypto::Digest prev = head ? head->block_hash : crypto::Digest{};
      if (auto fault = ledger::check_block(block, expected, prev, ledger_.authority_key())) {
        const auto reason = std::string(to_string(fault->kind)) + ": " + fault->detail;
        throw Error(Errc::InvalidBlock, "block " + std::to_string(block.height) + ": " + reason,
                    {{"height", static_cast<std::int64_t>(block.height)}, {"reason", reason}});
      }
      try {
        apply_block(scratch, block);
      } catch (const Error& e) {
        scratch_dirty = true;
        throw Error(Errc::InvalidBlock,
                    "block " + std::to_string(block.height) + ": " + e.what(),
                    {{"height", static_cast<std::int64_t>(block.height)},
                     {"reason", std::string(e.what())}});
      }
      try {
        ledger_.append_verified(block);
      } catch (...) {
        scratch_dirty = true;
        throw;
      }
      ++persisted;
      last_timestamp_ = std::max(last_timestamp_, block.timestamp);
    }
  } catch (...) {
    publish();
    throw;
  }
  publish();
  return persisted;
}

}  // namespace pl
