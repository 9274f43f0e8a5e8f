#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace pl {

/// Field caps shared by the API and every client. Sizes are UTF-8 bytes.
namespace limits {
inline constexpr std::size_t kInfoBytes = 4096;
inline constexpr std::size_t kLocationBytes = 256;
inline constexpr std::size_t kReasonBytes = 256;
inline constexpr std::size_t kPassportBytes = 64;
inline constexpr std::size_t kNoteBytes = 256;
inline constexpr std::size_t kSourceBytes = 256;
}  // namespace limits

/// `[A-Z]{3}`
bool is_airport_code(std::string_view code);

bool is_valid_utf8(std::string_view text);

std::string trim(std::string_view text);

}  // namespace pl
