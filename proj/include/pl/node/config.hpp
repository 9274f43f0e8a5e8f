#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pl/common/crypto.hpp"

namespace pl::node {

enum class NodeRole { Authority, Replica };

/// Node configuration. Loaded from a JSON file whose keys match the field
/// names below; every key can be overridden by an environment variable named
/// PL_<KEY in upper case> (PL_PEERS is comma-separated).
struct NodeConfig {
  NodeRole role = NodeRole::Authority;
  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path data_dir = "data";
  crypto::PublicKey authority_public_key{};
  std::optional<crypto::Seed> authority_private_key;
  std::vector<std::string> peers;
  int sync_interval = 5;  // seconds
  std::optional<std::filesystem::path> policy_path;
  std::string auth_token;
  std::string authority_id = "authority";
  std::string uid_prefix = "IN";
  std::size_t max_batch = 1000;
  int batch_linger_ms = 0;
  bool fsync = true;

  /// Throws Error{ConfigError}.
  void validate() const;

  std::string host() const;
  int port() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Parses and validates. `path` may be empty (environment only).
/// Throws Error{ConfigError}.
NodeConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);
NodeConfig parse_config(std::string_view json_text, const EnvLookup& env = process_env);

std::string_view to_string(NodeRole role);

}  // namespace pl::node
