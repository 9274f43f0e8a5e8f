#pragma once

#include <algorithm>
#include <cstdlib>
#include <tuple>
#include <vector>

#include "pl/registry/state.hpp"

namespace pl::test {

struct OracleHit {
  std::size_t visit_index;
  std::size_t report_index;  // ingestion order
  std::int32_t offset;
  friend bool operator==(const OracleHit&, const OracleHit&) = default;
};

/// Every (visit, report) pair at the same airport whose dates differ by at
/// most 14 days, by plain double loop.
inline std::vector<OracleHit> brute_force_exposures(const State& s, const UserRecord& u) {
  std::vector<OracleHit> hits;
  for (std::size_t v = 0; v < u.travel_history.size(); ++v) {
    const auto& visit = u.travel_history[v];
    for (std::size_t r = 0; r < s.hotspots.size(); ++r) {
      const auto& rep = s.hotspots[r].report;
      const auto delta = rep.case_date.days() - visit.visit_date.days();
      if (rep.airport_code == visit.airport_code && std::abs(delta) <= 14)
        hits.push_back({v, r, delta});
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [&](const OracleHit& a, const OracleHit& b) {
    return std::tuple(a.visit_index, s.hotspots[a.report_index].report.case_date) <
           std::tuple(b.visit_index, s.hotspots[b.report_index].report.case_date);
  });
  return hits;
}

/// Maps findings back to oracle form.
inline std::vector<OracleHit> as_hits(const State& s, const UserRecord& u,
                                      const std::vector<SuspicionFinding>& findings) {
  std::vector<OracleHit> out;
  for (const auto& f : findings) {
    OracleHit h{SIZE_MAX, SIZE_MAX, f.day_offset};
    for (std::size_t v = 0; v < u.travel_history.size(); ++v)
      if (u.travel_history[v] == f.visit && h.visit_index == SIZE_MAX) h.visit_index = v;
    for (std::size_t r = 0; r < s.hotspots.size(); ++r)
      if (s.hotspots[r].event_id == f.report.event_id) h.report_index = r;
    out.push_back(h);
  }
  return out;
}

}  // namespace pl::test
