#include "pl/ledger/merkle.hpp"

namespace pl::ledger {

crypto::Digest merkle_leaf(ByteView bytes) {
  return crypto::Sha256().update(std::uint8_t{0x00}).update(bytes).finish();
}

crypto::Digest merkle_node(const crypto::Digest& left, const crypto::Digest& right) {
  return crypto::Sha256().update(std::uint8_t{0x01}).update(left).update(right).finish();
}

crypto::Digest merkle_root(std::span<const crypto::Digest> leaves) {
  if (leaves.empty()) return crypto::sha256({});
  std::vector<crypto::Digest> level(leaves.begin(), leaves.end());
  while (level.size() > 1) {
    std::vector<crypto::Digest> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      const auto& right = i + 1 < level.size() ? level[i + 1] : level[i];
      next.push_back(merkle_node(level[i], right));
    }
    level = std::move(next);
  }
  return level.front();
}

}  // namespace pl::ledger
