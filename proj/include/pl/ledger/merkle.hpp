#pragma once

#include <span>
#include <vector>

#include "pl/common/crypto.hpp"

namespace pl::ledger {

/// SHA-256(0x00 || bytes)
crypto::Digest merkle_leaf(ByteView bytes);
/// SHA-256(0x01 || left || right)
crypto::Digest merkle_node(const crypto::Digest& left, const crypto::Digest& right);

/// Binary Merkle root; an odd node at any level is paired with itself.
/// The root of an empty list is SHA-256 of the empty string.
crypto::Digest merkle_root(std::span<const crypto::Digest> leaves);

}  // namespace pl::ledger
