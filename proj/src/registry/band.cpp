#include "pl/registry/band.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace pl {

std::string_view to_string(ColourBand band) {
  switch (band) {
    case ColourBand::Green: return "Green";
    case ColourBand::Amber: return "Amber";
    case ColourBand::Red: return "Red";
  }
  return "?";
}

std::optional<ColourBand> parse_band(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "green") return ColourBand::Green;
  if (lower == "amber") return ColourBand::Amber;
  if (lower == "red") return ColourBand::Red;
  return std::nullopt;
}

std::optional<ColourBand> band_from_byte(std::uint8_t value) {
  if (value > 2) return std::nullopt;
  return static_cast<ColourBand>(value);
}

bool transition_allowed(ColourBand from, ColourBand to, bool confirmed_positive) {
  using enum ColourBand;
  switch (from) {
    case Green: return to == Amber || (to == Red && confirmed_positive);
    case Amber: return to == Red || to == Green;
    case Red: return to == Amber;
  }
  return false;
}

}  // namespace pl
