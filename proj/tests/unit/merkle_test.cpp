#include <gtest/gtest.h>

#include <random>

#include "pl/common/crypto.hpp"
#include "pl/ledger/merkle.hpp"

namespace pl::ledger {
namespace {

Bytes cat(std::uint8_t tag, ByteView a, ByteView b = {}) {
  Bytes out{tag};
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Recursive reference: pad the level by duplicating its last node and hash
// pairs, written independently of the iterative implementation.
crypto::Digest reference_root(std::vector<Bytes> leaves) {
  if (leaves.empty()) return crypto::sha256({});
  std::vector<crypto::Digest> level;
  for (const auto& l : leaves) level.push_back(crypto::sha256(cat(0x00, l)));
  while (level.size() > 1) {
    if (level.size() % 2) level.push_back(level.back());
    std::vector<crypto::Digest> next;
    for (std::size_t i = 0; i < level.size(); i += 2)
      next.push_back(crypto::sha256(cat(0x01, level[i], level[i + 1])));
    level = std::move(next);
  }
  return level[0];
}

TEST(Merkle, EmptyAndSingle) {
  EXPECT_EQ(merkle_root({}), crypto::sha256({}));
  const Bytes leaf{1, 2, 3};
  const auto d = merkle_leaf(leaf);
  EXPECT_EQ(d, crypto::sha256(cat(0x00, leaf)));
  EXPECT_EQ(merkle_root(std::vector{d}), d);
}

TEST(Merkle, MatchesReferenceOnRandomInputs) {
  std::mt19937 rng(11);
  for (std::size_t n = 1; n <= 40; ++n) {
    std::vector<Bytes> raw;
    std::vector<crypto::Digest> leaves;
    for (std::size_t i = 0; i < n; ++i) {
      Bytes b(rng() % 20);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      leaves.push_back(merkle_leaf(b));
      raw.push_back(std::move(b));
    }
    EXPECT_EQ(merkle_root(leaves), reference_root(raw)) << "n=" << n;
  }
}

TEST(Merkle, OrderMatters) {
  const auto a = merkle_leaf(Bytes{1}), b = merkle_leaf(Bytes{2});
  EXPECT_NE(merkle_root(std::vector{a, b}), merkle_root(std::vector{b, a}));
  EXPECT_EQ(merkle_node(a, b), crypto::sha256(cat(0x01, a, b)));
}

}  // namespace
}  // namespace pl::ledger
