#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace pl {

enum class ColourBand : std::uint8_t { Green = 0, Amber = 1, Red = 2 };

std::string_view to_string(ColourBand band);
/// Accepts "Green"/"green"/"GREEN" etc.
std::optional<ColourBand> parse_band(std::string_view text);
std::optional<ColourBand> band_from_byte(std::uint8_t value);

/// Permitted moves:
///   Green -> Amber   suspicion raised or test ordered
///   Amber -> Red     positive result
///   Amber -> Green   negative result
///   Red   -> Amber   recovery retest ordered
///   Green -> Red     only with confirmed_positive
/// Everything else, including staying in the same band, is rejected.
bool transition_allowed(ColourBand from, ColourBand to, bool confirmed_positive);

}  // namespace pl
