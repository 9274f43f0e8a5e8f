#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <csignal>
#include <iostream>
#include <pthread.h>

#include "pl/node/node.hpp"

namespace {

int keygen() {
  const auto key = pl::crypto::SigningKey::generate();
  std::cout << "authority_private_key " << pl::crypto::to_hex(key.seed()) << "\n"
            << "authority_public_key  " << pl::crypto::to_hex(key.public_key()) << "\n";
  return 0;
}

int serve(const std::string& config_path) {
  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto config = pl::node::load_config(config_path);
  pl::node::Node node(std::move(config));
  node.start();
  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {}, shutting down", sig);
  node.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passport ledger node", "pl-node"};
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config file (PL_* variables override)");
  auto* gen = app.add_subcommand("keygen", "Print a fresh authority key pair");
  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return keygen();
    return serve(config_path);
  } catch (const pl::Error& e) {
    std::cerr << "pl-node: " << pl::code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
}
