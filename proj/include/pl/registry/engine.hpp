#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <thread>
#include <vector>

#include "pl/common/error.hpp"
#include "pl/ledger/ledger.hpp"
#include "pl/ledger/payloads.hpp"
#include "pl/registry/state.hpp"

namespace pl {

struct EngineOptions {
  std::string uid_prefix = "IN";
  /// How long the committer waits for more events once one is pending.
  /// Zero commits as soon as the writer is idle.
  std::chrono::milliseconds batch_linger{0};
  std::function<Timestamp()> clock = system_now;
  /// Fixed seed for reproducible uids and event ids.
  std::optional<std::uint64_t> seed;
};

class Engine;

/// Collects the events of one logical operation. The builder validates
/// against `state()` and emits; nothing is applied until the builder returns.
class Tx {
 public:
  const State& state() const noexcept { return state_; }
  Timestamp now() const noexcept { return now_; }

  std::string new_uid();
  const ledger::Event& emit(std::optional<std::string> subject, const ledger::Payload& payload);

  const std::vector<ledger::Event>& events() const noexcept { return events_; }

 private:
  friend class Engine;
  Tx(Engine& engine, const State& state, Timestamp now)
      : engine_(engine), state_(state), now_(now) {}

  Engine& engine_;
  const State& state_;
  Timestamp now_;
  std::vector<ledger::Event> events_;
  std::vector<std::string> issued_uids_;
};

template <class T>
struct Recorded {
  T value;
  ledger::Height block_height = 0;
};

/// Owns the derived state for one ledger and funnels every write through a
/// single writer.
///
/// transact() runs a builder under the writer lock, folds the emitted events
/// into the state, queues them for the committer thread and then waits until
/// the block holding them is durable. Events of one transaction always land
/// in the same block (up to max_batch events); the committer packs pending
/// transactions into blocks of at most max_batch events.
///
/// If a commit fails the engine is marked faulted: every queued transaction
/// fails with StorageFailure and the next write rebuilds the state from the
/// ledger before proceeding.
class Engine {
 public:
  using AppendFn = std::function<ledger::Block(std::vector<ledger::Event>)>;

  explicit Engine(ledger::Ledger& ledger, EngineOptions options = {});
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// `build(Tx&)` emits events; `project(const State&)` computes the result
  /// from the post-apply state. Returns the result and the recording block
  /// height (empty when nothing was emitted).
  template <class Build, class Project>
  auto transact(Build&& build, Project&& project)
      -> std::pair<std::invoke_result_t<Project, const State&>, std::optional<ledger::Height>> {
    std::unique_lock writer(write_mu_);
    prepare_write();
    Tx tx(*this, state_, next_timestamp());
    build(tx);
    if (tx.events_.empty()) return {project(state_), std::nullopt};
    apply_locked(tx.events_);
    auto result = project(state_);
    auto pending = submit(std::move(tx.events_));
    writer.unlock();
    return {std::move(result), await(pending)};
  }

  template <class Fn>
  auto read(Fn&& fn) const {
    std::shared_lock lock(state_mu_);
    return fn(state_);
  }

  State snapshot() const;

  /// Replica path. Checks, applies and persists blocks in order; stops at the
  /// first bad block (InvalidBlock) leaving the valid prefix persisted.
  /// Returns the number of blocks persisted.
  std::size_t ingest_replicated(std::span<const ledger::Block> blocks);

  /// Appends a block without going through a transaction (genesis).
  ledger::Height commit_raw(std::vector<ledger::Event> events);

  ledger::EventId new_event_id();
  Timestamp next_timestamp();

  ledger::Ledger& ledger() noexcept { return ledger_; }
  const ledger::Ledger& ledger() const noexcept { return ledger_; }
  const EngineOptions& options() const noexcept { return options_; }

  /// Replaces the block append step; tests use it to inject failures.
  void set_append_fn(AppendFn fn);

  /// Blocks until every queued transaction has been committed or failed.
  void drain();

 private:
  friend class Tx;

  struct Unit {
    std::vector<ledger::Event> events;
    std::promise<ledger::Height> done;
  };

  void prepare_write();
  void apply_locked(const std::vector<ledger::Event>& events);
  std::vector<std::future<ledger::Height>> submit(std::vector<ledger::Event> events);
  ledger::Height await(std::vector<std::future<ledger::Height>>& pending);
  void committer_loop();
  void rebuild_locked();

  ledger::Ledger& ledger_;
  EngineOptions options_;

  std::mutex write_mu_;
  mutable std::shared_mutex state_mu_;
  State state_;
  Timestamp last_timestamp_ = 0;
  std::mt19937_64 rng_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<Unit> queue_;
  bool busy_ = false;
  bool faulted_ = false;
  bool stopping_ = false;
  AppendFn append_;
  std::thread committer_;
};

}  // namespace pl
