#pragma once

#include <cstdint>
#include <string>

namespace pl {

/// balance == lifetime_issued - lifetime_redeemed, always >= 0.
struct TokenAccount {
  std::string uid;
  std::uint64_t balance = 0;
  std::uint64_t lifetime_issued = 0;
  std::uint64_t lifetime_redeemed = 0;

  friend bool operator==(const TokenAccount&, const TokenAccount&) = default;
};

}  // namespace pl
