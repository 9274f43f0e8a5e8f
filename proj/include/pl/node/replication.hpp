#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "pl/registry/engine.hpp"

namespace pl::node {

struct SyncResult {
  std::size_t fetched = 0;
  std::optional<ledger::Height> new_head;
};

struct SyncOptions {
  std::size_t page_size = 100;
  std::chrono::milliseconds timeout{5000};
};

/// Pulls blocks from `peer` (base URL, e.g. http://10.0.0.5:8080) starting
/// at the local head + 1 until the peer's head. Every block is checked
/// against the configured authority key and the local chain before it is
/// persisted; the first bad block stops the sync with the valid prefix kept.
///
/// Errors: PeerUnreachable, InvalidBlock (details.height).
SyncResult sync_once(Engine& engine, const std::string& peer, const SyncOptions& options = {});

}  // namespace pl::node
