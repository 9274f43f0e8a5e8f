#include "pl/node/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pl/common/error.hpp"
#include "pl/common/text.hpp"

namespace pl::node {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

NodeRole parse_role(const std::string& s) {
  if (s == "authority" || s == "Authority") return NodeRole::Authority;
  if (s == "replica" || s == "Replica") return NodeRole::Replica;
  config_error("role must be 'authority' or 'replica', got '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  config_error(key + " must be true/false");
}

long parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    auto v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    config_error(key + " must be an integer");
  }
}

// Applies one setting given as text (env values and JSON strings share this).
void set_from_text(NodeConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "role") c.role = parse_role(value);
    else if (key == "listen_address") c.listen_address = value;
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "authority_public_key")
      c.authority_public_key = crypto::fixed_from_hex<32>(value);
    else if (key == "authority_private_key") {
      if (value.empty()) c.authority_private_key.reset();
      else c.authority_private_key = crypto::fixed_from_hex<32>(value);
    } else if (key == "peers") c.peers = split_csv(value);
    else if (key == "sync_interval") c.sync_interval = static_cast<int>(parse_int(key, value));
    else if (key == "policy_path") {
      if (value.empty()) c.policy_path.reset();
      else c.policy_path = value;
    } else if (key == "auth_token") c.auth_token = value;
    else if (key == "authority_id") c.authority_id = value;
    else if (key == "uid_prefix") c.uid_prefix = value;
    else if (key == "max_batch") {
      auto v = parse_int(key, value);
      if (v < 1) config_error("max_batch must be positive");
      c.max_batch = static_cast<std::size_t>(v);
    } else if (key == "batch_linger_ms") c.batch_linger_ms = static_cast<int>(parse_int(key, value));
    else if (key == "fsync") c.fsync = parse_bool(key, value);
    else config_error("unknown config key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    config_error(key + ": " + e.what());
  }
}

constexpr const char* kKeys[] = {"role",          "listen_address",  "data_dir",
                                 "authority_public_key", "authority_private_key",
                                 "peers",         "sync_interval",   "policy_path",
                                 "auth_token",    "authority_id",    "uid_prefix",
                                 "max_batch",     "batch_linger_ms", "fsync"};

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::string_view to_string(NodeRole role) {
  return role == NodeRole::Authority ? "authority" : "replica";
}

std::string NodeConfig::host() const {
  auto colon = listen_address.rfind(':');
  return colon == std::string::npos ? listen_address : listen_address.substr(0, colon);
}

int NodeConfig::port() const {
  auto colon = listen_address.rfind(':');
  if (colon == std::string::npos) config_error("listen_address must be host:port");
  return static_cast<int>(parse_int("listen_address port", listen_address.substr(colon + 1)));
}

void NodeConfig::validate() const {
  const auto p = port();
  if (p < 0 || p > 65535) config_error("listen port out of range");
  if (role == NodeRole::Authority) {
    if (!authority_private_key) config_error("authority node requires authority_private_key");
    if (auth_token.empty()) config_error("authority node requires auth_token for writes");
    const auto derived = crypto::SigningKey::from_seed(*authority_private_key).public_key();
    if (derived != authority_public_key)
      config_error("authority_private_key does not match authority_public_key");
  } else {
    if (peers.empty()) config_error("replica node requires at least one peer");
  }
  if (sync_interval < 1) config_error("sync_interval must be at least 1 second");
  if (batch_linger_ms < 0 || batch_linger_ms > 1000)
    config_error("batch_linger_ms must be within [0, 1000]");
}

NodeConfig parse_config(std::string_view json_text, const EnvLookup& env) {
  NodeConfig c;
  bool have_public = false;
  if (!json_text.empty()) {
    json doc;
    try {
      doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
      config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) config_error("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "authority_public_key") have_public = true;
      if (key == "peers" && value.is_array()) {
        c.peers.clear();
        for (const auto& p : value) {
          if (!p.is_string()) config_error("peers must be strings");
          c.peers.push_back(p.get<std::string>());
        }
      } else if (value.is_string()) {
        set_from_text(c, key, value.get<std::string>());
      } else if (value.is_boolean()) {
        set_from_text(c, key, value.get<bool>() ? "true" : "false");
      } else if (value.is_number_integer()) {
        set_from_text(c, key, std::to_string(value.get<long>()));
      } else if (value.is_null()) {
        set_from_text(c, key, "");
      } else {
        config_error("unsupported value for '" + key + "'");
      }
    }
  }
  for (const char* key : kKeys) {
    std::string name = "PL_";
    for (const char* p = key; *p; ++p) name.push_back(static_cast<char>(std::toupper(*p)));
    if (auto v = env(name)) {
      if (std::string(key) == "authority_public_key") have_public = true;
      set_from_text(c, key, *v);
    }
  }
  if (!have_public && c.authority_private_key)
    c.authority_public_key = crypto::SigningKey::from_seed(*c.authority_private_key).public_key();
  c.validate();
  return c;
}

NodeConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config(text, env);
}

}  // namespace pl::node
