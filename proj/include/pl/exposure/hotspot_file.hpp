#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pl/exposure/hotspot.hpp"

namespace pl {

struct HotspotLineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct HotspotFile {
  std::vector<HotspotReport> reports;  // file order
  std::vector<std::size_t> lines;      // source line of each report
  std::vector<HotspotLineError> errors;
};

/// Bulk format, UTF-8, one record per line:
///
///   AIRPORT,YYYY-MM-DD,COUNT,SOURCE
///
/// Lines starting with '#' and blank lines are skipped. SOURCE is the rest of
/// the line and may itself contain commas. Bad lines are reported and do not
/// stop the parse.
HotspotFile parse_hotspot_file(std::string_view text);

}  // namespace pl
