#include "pl/node/replication.hpp"

#include <httplib.h>

#include <json.hpp>

namespace pl::node {

using nlohmann::json;

namespace {

[[noreturn]] void unreachable(const std::string& peer, const std::string& why) {
  throw Error(Errc::PeerUnreachable, "peer " + peer + ": " + why, {{"peer", peer}});
}

}  // namespace

SyncResult sync_once(Engine& engine, const std::string& peer, const SyncOptions& options) {
  httplib::Client client(peer);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  if (!client.is_valid()) unreachable(peer, "invalid peer URL");

  SyncResult result;
  auto& ledger = engine.ledger();
  for (;;) {
    const auto head = ledger.head();
    const ledger::Height next = head ? head->height + 1 : 0;
    const auto path = "/chain/blocks?from=" + std::to_string(next) +
                      "&limit=" + std::to_string(options.page_size);
    auto res = client.Get(path);
    if (!res) unreachable(peer, httplib::to_string(res.error()));
    if (res->status != 200) unreachable(peer, "HTTP " + std::to_string(res->status));

    json body;
    std::vector<ledger::Block> blocks;
    std::optional<Error> bad_frame;
    try {
      body = json::parse(res->body);
      for (const auto& item : body.at("blocks")) {
        const auto height = item.at("height").get<ledger::Height>();
        try {
          blocks.push_back(ledger::decode_block(
              crypto::base64_decode(item.at("frame").get<std::string>())));
        } catch (const std::exception& e) {
          bad_frame = Error(Errc::InvalidBlock,
                            "block " + std::to_string(height) + ": undecodable frame: " + e.what(),
                            {{"height", static_cast<std::int64_t>(height)},
                             {"reason", std::string("undecodable frame")}});
          break;
        }
      }
    } catch (const json::exception& e) {
      unreachable(peer, std::string("malformed response: ") + e.what());
    }

    const auto persisted = engine.ingest_replicated(blocks);  // throws InvalidBlock
    result.fetched += persisted;
    if (bad_frame) throw *bad_frame;
    if (blocks.empty()) break;

    const auto& peer_head = body.at("head");
    if (peer_head.is_null()) break;
    const auto now = ledger.head();
    if (now && now->height >= peer_head.get<ledger::Height>()) break;
  }
  if (auto h = ledger.head()) result.new_head = h->height;
  return result;
}

}  // namespace pl::node
