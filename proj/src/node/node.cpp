#include "pl/node/node.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include "pl/node/api.hpp"

namespace pl::node {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read policy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Node::Node(NodeConfig config) : config_(std::move(config)) {
  config_.validate();

  ledger::LedgerOptions lopts;
  lopts.authority_key = config_.authority_public_key;
  if (is_authority()) lopts.signer = crypto::SigningKey::from_seed(*config_.authority_private_key);
  lopts.authority_id = config_.authority_id;
  lopts.max_batch = config_.max_batch;
  lopts.fsync = config_.fsync;
  ledger_ = std::make_unique<ledger::Ledger>(config_.data_dir, lopts);

  if (ledger_->size() > 0) {
    const auto report = ledger_->verify_all();
    if (!report.ok())
      throw Error(Errc::CorruptStore,
                  "stored chain fails verification at height " +
                      std::to_string(report.failure->height) + ": " + report.failure->detail,
                  {{"height", static_cast<std::int64_t>(report.failure->height)},
                   {"failure", std::string(to_string(report.failure->kind))}});
  }

  EngineOptions eopts;
  eopts.uid_prefix = config_.uid_prefix;
  eopts.batch_linger = std::chrono::milliseconds(config_.batch_linger_ms);
  engine_ = std::make_unique<Engine>(*ledger_, eopts);

  if (is_authority() && ledger_->size() == 0) {
    const auto& key = config_.authority_public_key;
    auto genesis = ledger::make_event(
        engine_->new_event_id(), std::nullopt,
        ledger::ConfigPayload{std::string(ledger::config_keys::kAuthorityKey),
                              Bytes(key.begin(), key.end())},
        engine_->next_timestamp());
    engine_->commit_raw({std::move(genesis)});
    spdlog::info("created genesis block in {}", config_.data_dir.string());
  }

  registry_ = std::make_unique<Registry>(*engine_);
  exposure_ = std::make_unique<Exposure>(*engine_);
  incentives_ = std::make_unique<Incentives>(*engine_);
  if (config_.policy_path) incentives_->load_policy(read_file(*config_.policy_path));
}

Node::~Node() { stop(); }

void Node::start() {
  if (started_) return;
  server_ = std::make_unique<httplib::Server>();
  // httplib's defaults include SO_REUSEPORT, which would let a second node
  // share the port silently instead of failing to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  install_api(*server_, *this);
  const auto host = config_.host();
  const int want = config_.port();
  if (want == 0) {
    bound_port_ = server_->bind_to_any_port(host);
    if (bound_port_ <= 0)
      throw Error(Errc::BindFailure, "cannot bind " + host + ":0");
  } else {
    if (!server_->bind_to_port(host, want))
      throw Error(Errc::BindFailure, "cannot bind " + config_.listen_address);
    bound_port_ = want;
  }
  {
    std::lock_guard lock(stop_mu_);
    stopped_ = false;
  }
  started_ = true;
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  if (!is_authority()) sync_thread_ = std::thread([this] { sync_loop(); });
  spdlog::info("{} listening on {}:{}", to_string(config_.role), host, bound_port_);
}

void Node::stop() {
  {
    std::lock_guard lock(stop_mu_);
    if (stopped_ && !started_) return;
    stopped_ = true;
  }
  stop_cv_.notify_all();
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (sync_thread_.joinable()) sync_thread_.join();
  started_ = false;
}

void Node::wait() {
  std::unique_lock lock(stop_mu_);
  stop_cv_.wait(lock, [&] { return stopped_; });
}

std::string Node::base_url() const {
  return "http://" + config_.host() + ":" + std::to_string(bound_port_);
}

VerifyResponse Node::verify_user(std::string_view query) const {
  const auto user = registry_->find_user(query);
  // The head is read after the state: the committer publishes a block before
  // it returns to the writer, so the head already holds the band reported.
  const auto head = ledger_->head();
  VerifyResponse out;
  out.uid = user.uid;
  out.band = user.band;
  out.band_reason = user.band_reason;
  out.as_of_block = head ? head->height : 0;
  out.chain_head_hash = head ? head->block_hash : crypto::Digest{};
  return out;
}

SyncResult Node::sync_once(const std::string& peer) { return node::sync_once(*engine_, peer); }

void Node::sync_loop() {
  std::unique_lock lock(stop_mu_);
  while (!stopped_) {
    lock.unlock();
    for (const auto& peer : config_.peers) {
      try {
        const auto r = sync_once(peer);
        if (r.fetched) spdlog::info("synced {} blocks from {}", r.fetched, peer);
        break;
      } catch (const Error& e) {
        spdlog::warn("sync from {} failed: {}", peer, e.what());
      }
    }
    lock.lock();
    stop_cv_.wait_for(lock, std::chrono::seconds(config_.sync_interval), [&] { return stopped_; });
  }
}

}  // namespace pl::node
