#include "pl/incentives/policy.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "pl/common/error.hpp"
#include "pl/common/text.hpp"

namespace pl {
namespace {

bool is_identifier(std::string_view s, std::string_view extra) {
  if (s.empty() || s.size() > 64) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || extra.find(c) != std::string_view::npos;
  });
}

std::vector<std::string> split_fields(std::string_view line, std::size_t max_fields) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_fields) {
    auto bar = line.find('|', start);
    if (bar == std::string_view::npos) break;
    out.push_back(trim(line.substr(start, bar - start)));
    start = bar + 1;
  }
  out.push_back(trim(line.substr(start)));
  return out;
}

}  // namespace

const Benefit* RedemptionPolicy::find_benefit(std::string_view id) const {
  auto it = std::find_if(benefits.begin(), benefits.end(),
                         [&](const Benefit& b) { return b.benefit_id == id; });
  return it == benefits.end() ? nullptr : &*it;
}

bool RedemptionPolicy::has_reason(std::string_view code) const {
  return std::any_of(reasons.begin(), reasons.end(),
                     [&](const IncentiveReason& r) { return r.code == code; });
}

RedemptionPolicy default_policy() {
  RedemptionPolicy p;
  p.reasons = {{"VoluntaryTest", "voluntary testing"},
               {"SelfQuarantine", "agreed to self-quarantine"}};
  return p;
}

RedemptionPolicy parse_policy(std::string_view document) {
  auto policy = default_policy();
  policy.digest = crypto::sha256(as_bytes(document));
  if (!is_valid_utf8(document)) throw Error(Errc::ParseError, "policy is not valid UTF-8");

  std::set<std::string> ids;
  std::size_t line_no = 0, pos = 0;
  while (pos < document.size()) {
    auto nl = document.find('\n', pos);
    auto line = document.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                  : nl - pos);
    pos = nl == std::string_view::npos ? document.size() : nl + 1;
    ++line_no;
    const auto trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    auto parse_error = [&](const std::string& why) {
      throw Error(Errc::ParseError, "policy line " + std::to_string(line_no) + ": " + why,
                  {{"line", static_cast<std::int64_t>(line_no)}});
    };

    if (trimmed.starts_with("@reason|")) {
      auto f = split_fields(trimmed, 3);
      if (f.size() < 2 || !is_identifier(f[1], "")) parse_error("expected @reason|CODE|description");
      if (!policy.has_reason(f[1]))
        policy.reasons.push_back({f[1], f.size() > 2 ? f[2] : std::string{}});
      continue;
    }

    auto f = split_fields(trimmed, 4);
    if (f.size() != 4) parse_error("expected benefit_id|cost|enabled|description");
    if (!is_identifier(f[0], ".-")) parse_error("invalid benefit id '" + f[0] + "'");

    std::int64_t cost = 0;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), cost);
    if (ec != std::errc{} || ptr != f[1].data() + f[1].size())
      parse_error("invalid cost '" + f[1] + "'");
    if (cost < 1)
      throw Error(Errc::NonPositiveCost,
                  "benefit " + f[0] + " has non-positive cost " + std::to_string(cost),
                  {{"benefit_id", f[0]}, {"line", static_cast<std::int64_t>(line_no)}});
    if (f[2] != "0" && f[2] != "1") parse_error("enabled must be 0 or 1");
    if (!ids.insert(f[0]).second)
      throw Error(Errc::DuplicateBenefitId, "duplicate benefit id " + f[0],
                  {{"benefit_id", f[0]}, {"line", static_cast<std::int64_t>(line_no)}});
    policy.benefits.push_back({f[0], static_cast<std::uint64_t>(cost), f[3], f[2] == "1"});
  }
  return policy;
}

}  // namespace pl
