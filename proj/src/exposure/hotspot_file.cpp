#include "pl/exposure/hotspot_file.hpp"

#include <charconv>

#include "pl/common/error.hpp"
#include "pl/common/text.hpp"
#include "pl/exposure/exposure.hpp"

namespace pl {

HotspotFile parse_hotspot_file(std::string_view text) {
  HotspotFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#' || trim(line).empty()) continue;

    auto fail = [&](std::string msg) { out.errors.push_back({line_no, std::move(msg)}); };

    std::string_view fields[4];
    std::size_t start = 0;
    bool short_line = false;
    for (int i = 0; i < 3; ++i) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        short_line = true;
        break;
      }
      fields[i] = line.substr(start, comma - start);
      start = comma + 1;
    }
    if (short_line) {
      fail("expected AIRPORT,YYYY-MM-DD,COUNT,SOURCE");
      continue;
    }
    fields[3] = line.substr(start);

    HotspotReport report;
    report.airport_code = trim(fields[0]);
    const auto date = CalendarDate::parse(trim(fields[1]));
    if (!date) {
      fail("invalid date '" + trim(fields[1]) + "'");
      continue;
    }
    report.case_date = *date;
    const auto count_text = trim(fields[2]);
    std::uint32_t count = 0;
    auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size()) {
      fail("invalid case count '" + count_text + "'");
      continue;
    }
    report.case_count = count;
    report.source = trim(fields[3]);
    try {
      validate_report(report);
    } catch (const Error& e) {
      fail(e.what());
      continue;
    }
    out.reports.push_back(std::move(report));
    out.lines.push_back(line_no);
  }
  return out;
}

}  // namespace pl
