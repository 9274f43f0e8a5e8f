#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "pl/exposure/exposure.hpp"
#include "pl/incentives/incentives.hpp"
#include "pl/ledger/ledger.hpp"
#include "pl/node/config.hpp"
#include "pl/node/json_codec.hpp"
#include "pl/node/replication.hpp"
#include "pl/registry/engine.hpp"
#include "pl/registry/registry.hpp"

namespace httplib {
class Server;
}

namespace pl::node {

/// A running authority or replica.
///
/// Construction opens the store and refuses to continue (CorruptStore) if the
/// persisted chain does not verify. A fresh authority writes the genesis
/// block: one Config event naming the authority key.
class Node {
 public:
  explicit Node(NodeConfig config);
  ~Node();

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  /// Binds and serves in the background. Throws BindFailure.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  int port() const noexcept { return bound_port_; }
  std::string base_url() const;

  /// Throws NotFound.
  VerifyResponse verify_user(std::string_view query) const;
  SyncResult sync_once(const std::string& peer);

  const NodeConfig& config() const noexcept { return config_; }
  bool is_authority() const noexcept { return config_.role == NodeRole::Authority; }
  ledger::Ledger& ledger() noexcept { return *ledger_; }
  Engine& engine() noexcept { return *engine_; }
  Registry& registry() noexcept { return *registry_; }
  Exposure& exposure() noexcept { return *exposure_; }
  Incentives& incentives() noexcept { return *incentives_; }

 private:
  void sync_loop();

  NodeConfig config_;
  std::unique_ptr<ledger::Ledger> ledger_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<Registry> registry_;
  std::unique_ptr<Exposure> exposure_;
  std::unique_ptr<Incentives> incentives_;

  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread sync_thread_;
  int bound_port_ = 0;

  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopped_ = false;
  bool started_ = false;
};

}  // namespace pl::node
