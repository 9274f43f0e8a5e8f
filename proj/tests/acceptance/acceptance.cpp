// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "exposure_oracle.hpp"
#include "files.hpp"
#include "harness.hpp"
#include "node_harness.hpp"
#include "pl/ledger/payloads.hpp"
#include "workload.hpp"

namespace pl::test {
namespace {

using Clock = std::chrono::steady_clock;
using node::json;

// Pinned tolerances and sizes.
constexpr std::size_t kTamperBlocks = 100;
constexpr std::size_t kTamperEventsPerBlock = 20;
constexpr std::size_t kTamperFlips = 1000;
constexpr double kTamperSeconds = 30;

constexpr std::size_t kReplayOps = 10'000;
constexpr double kReplaySeconds = 60;

constexpr std::size_t kExposureUsers = 1000;
constexpr std::size_t kExposureMaxVisits = 10;
constexpr std::size_t kExposureAirports = 20;
constexpr std::size_t kExposureReports = 500;
constexpr double kExposureSeconds = 30;

constexpr std::size_t kTokenOps = 5000;
constexpr std::size_t kTokenCheckpoint = 500;
constexpr double kTokenSeconds = 30;

constexpr std::size_t kVolunteerCalls = 5;

constexpr std::size_t kReplicationBlocks = 200;
constexpr int kReplicationPollSeconds = 1;
constexpr double kConvergeSeconds = 10;
constexpr double kReplicationSeconds = 120;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double secs) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", secs);
  return buf;
}

// Tamper evidence --------------------------------------------------------

ledger::Payload random_payload(std::mt19937_64& rng, std::size_t n) {
  const auto day = CalendarDate::from_ymd(2020, 1, 1).plus_days(static_cast<int>(rng() % 200));
  switch (rng() % 7) {
    case 0: return ledger::RegisterPayload{"P" + std::to_string(n), "city", "info"};
    case 1: return ledger::BandUpdatePayload{ColourBand::Green, ColourBand::Amber, "exposed", false, {}};
    case 2: return ledger::LocationUpdatePayload{"loc " + std::to_string(rng() % 1000)};
    case 3: return ledger::TravelLogPayload{"DEL", day, std::nullopt};
    case 4: return ledger::TokenIssuePayload{"VoluntaryTest", 1 + rng() % 5};
    case 5: return ledger::TokenRedeemPayload{"ration_pack", 1};
    default: return ledger::HotspotIngestPayload{"BOM", day, 3, "who"};
  }
}

Outcome tamper_evidence() {
  TempDir dir;
  const auto key = test_key();
  ledger::Ledger l(dir.path(), authority_options(key));
  std::mt19937_64 rng(11);
  l.append_block({config_event(key.public_key())});
  std::size_t events = 1, n = 0;
  while (l.size() < kTamperBlocks) {
    std::vector<ledger::Event> batch;
    for (std::size_t i = 0; i < kTamperEventsPerBlock; ++i, ++n) {
      ledger::EventId id{};
      for (int b = 0; b < 8; ++b) id[b] = static_cast<std::uint8_t>(n >> (8 * b));
      id[15] = 0xEE;
      auto payload = random_payload(rng, n);
      std::optional<std::string> subject;
      if (!ledger::is_subjectless(ledger::kind_of(payload)))
        subject = "IN-" + std::string(12, static_cast<char>('A' + n % 26));
      batch.push_back(ledger::make_event(id, subject, payload, 1'600'000'000 + n));
    }
    events += batch.size();
    l.append_block(std::move(batch));
  }
  if (!l.verify_all().ok()) return {false, "pristine chain failed to verify"};

  const auto t0 = Clock::now();
  const auto log = dir.path() / "chain.log";
  const auto spans = frame_spans(l);
  std::size_t detected = 0, late = 0, threw = 0;
  for (std::size_t i = 0; i < kTamperFlips; ++i) {
    const auto h = rng() % spans.size();
    const auto [begin, end] = spans[h];
    const auto off = begin + rng() % (end - begin);
    const auto mask = static_cast<std::uint8_t>(1 + rng() % 255);
    flip_byte(log, off, mask);
    try {
      const auto r = l.verify_all();
      if (!r.ok() && r.failure->height <= h)
        ++detected;
      else if (!r.ok())
        ++late;
    } catch (const std::exception&) {
      ++threw;
    }
    flip_byte(log, off, mask);
  }
  const auto secs = since(t0);
  const bool restored = l.verify_all().ok();
  std::ostringstream d;
  d << detected << "/" << kTamperFlips << " detected at or before the mutated height over "
    << l.size() << " blocks, " << events << " events";
  if (late) d << ", " << late << " reported too late";
  if (threw) d << ", " << threw << " threw instead of reporting";
  if (!restored) d << ", chain did not verify after restore";
  d << ", " << fmt(secs) << " (limit " << kTamperSeconds << "s)";
  return {detected == kTamperFlips && restored && secs < kTamperSeconds && events >= 1900,
          d.str()};
}

// Replay determinism ---------------------------------------------------

Outcome replay_determinism() {
  TempDir dir;
  const auto t0 = Clock::now();
  Stack s(dir.path(), 99);
  s.incentives->load_policy(kTestPolicy);
  Workload w(s, 31337);
  while (w.accepted() < kReplayOps) w.step();

  const auto incremental = s.engine->snapshot();
  const auto first = replay(s.ledger);
  const auto second = replay(s.ledger);
  const auto secs = since(t0);

  std::vector<std::string> problems;
  if (!w.surprises().empty()) problems.push_back("workload: " + w.surprises().front());
  if (!(incremental == first)) problems.push_back("replay differs from incremental state");
  if (incremental.serialize() != first.serialize())
    problems.push_back("serialized replay differs from incremental");
  if (first.serialize() != second.serialize()) problems.push_back("two replays differ");
  if (const auto m = diff(w.model(), first); !m.empty()) problems.push_back("model: " + m);
  if (secs >= kReplaySeconds) problems.push_back("too slow");

  std::ostringstream d;
  d << w.accepted() << " accepted ops (" << w.rejected() << " rejected), "
    << first.users.size() << " users, " << s.ledger.size() << " blocks";
  for (const auto& p : problems) d << "; " << p;
  d << ", " << fmt(secs) << " (limit " << kReplaySeconds << "s)";
  return {problems.empty(), d.str()};
}

// Exposure oracle ------------------------------------------------------

Outcome exposure_oracle() {
  TempDir dir;
  const auto t0 = Clock::now();
  Stack s(dir.path(), 5);
  std::mt19937_64 rng(777);
  std::vector<std::string> airports;
  for (std::size_t i = 0; i < kExposureAirports; ++i)
    airports.push_back(std::string{'A', static_cast<char>('A' + i), 'X'});
  const auto base = CalendarDate::from_ymd(2020, 2, 1);

  std::vector<std::string> uids;
  std::size_t visits = 0;
  for (std::size_t i = 0; i < kExposureUsers; ++i) {
    const auto uid = s.registry->register_user(std::nullopt).value.uid;
    uids.push_back(uid);
    const auto count = rng() % (kExposureMaxVisits + 1);
    for (std::size_t v = 0; v < count; ++v, ++visits)
      s.registry->log_travel(uid, TravelVisit{airports[rng() % airports.size()],
                                              base.plus_days(static_cast<int>(rng() % 90)),
                                              "v" + std::to_string(v)});
  }
  std::vector<HotspotReport> reports;
  for (std::size_t i = 0; i < kExposureReports; ++i)
    reports.push_back(HotspotReport{airports[rng() % airports.size()],
                                    base.plus_days(static_cast<int>(rng() % 120) - 15),
                                    static_cast<std::uint32_t>(1 + rng() % 20), "oracle"});
  s.exposure->ingest_batch(reports);

  // Directed boundary user at an airport no random data touches.
  const auto edge = s.registry->register_user(std::nullopt).value.uid;
  const auto pivot = CalendarDate::from_ymd(2020, 6, 1);
  s.registry->log_travel(edge, TravelVisit{"ZZB", pivot, std::nullopt});
  for (int off : {-15, -14, -13, 13, 14, 15})
    s.exposure->ingest_hotspot(HotspotReport{"ZZB", pivot.plus_days(off), 1, "edge"});
  uids.push_back(edge);

  const auto state = s.engine->snapshot();
  std::size_t matched = 0, hits = 0;
  std::string first_bad;
  for (const auto& uid : uids) {
    const auto& user = *state.find_uid(uid);
    const auto expected = brute_force_exposures(state, user);
    const auto actual = as_hits(state, user, s.exposure->evaluate_user(uid));
    hits += expected.size();
    if (actual == expected)
      ++matched;
    else if (first_bad.empty())
      first_bad = uid;
  }

  std::set<std::int32_t> edge_offsets;
  for (const auto& f : s.exposure->evaluate_user(edge)) edge_offsets.insert(f.day_offset);
  const std::set<std::int32_t> want{-14, -13, 13, 14};
  const auto secs = since(t0);

  std::ostringstream d;
  d << matched << "/" << uids.size() << " users match the brute force (" << visits << " visits, "
    << state.hotspots.size() << " reports, " << hits << " hits)";
  if (!first_bad.empty()) d << "; first mismatch " << first_bad;
  d << "; boundary offsets flagged {";
  for (auto o : edge_offsets) d << " " << o;
  d << " }, " << fmt(secs) << " (limit " << kExposureSeconds << "s)";
  return {matched == uids.size() && edge_offsets == want && hits > 0 && secs < kExposureSeconds,
          d.str()};
}

// Token conservation ---------------------------------------------------

// Σ issued − Σ redeemed according to the raw chain events.
std::int64_t chain_net_tokens(const ledger::Ledger& l) {
  std::int64_t net = 0;
  for (const auto& e : l.events()) {
    if (e.kind == ledger::EventKind::TokenIssue)
      net += static_cast<std::int64_t>(
          std::get<ledger::TokenIssuePayload>(ledger::decode_payload(e.kind, e.payload)).amount);
    else if (e.kind == ledger::EventKind::TokenRedeem)
      net -= static_cast<std::int64_t>(
          std::get<ledger::TokenRedeemPayload>(ledger::decode_payload(e.kind, e.payload)).cost);
  }
  return net;
}

Outcome token_conservation() {
  TempDir dir;
  const auto t0 = Clock::now();
  Stack s(dir.path(), 3);
  s.incentives->load_policy(kTestPolicy);
  std::mt19937_64 rng(4242);
  std::vector<std::string> uids;
  for (int i = 0; i < 40; ++i) uids.push_back(s.registry->register_user(std::nullopt).value.uid);
  // Never issued anything, so every redemption against it must fail.
  const auto pauper = s.registry->register_user(std::nullopt).value.uid;

  std::int64_t issued = 0, redeemed = 0;
  std::size_t ok_redeems = 0, failed_redeems = 0, forced = 0, checkpoints = 0;
  std::vector<std::string> problems;
  auto note = [&](std::string p) {
    if (problems.size() < 5) problems.push_back(std::move(p));
  };

  for (std::size_t op = 1; op <= kTokenOps; ++op) {
    const auto& uid = uids[rng() % uids.size()];
    const auto roll = rng() % 10;
    if (roll < 4) {
      const auto amount = 1 + rng() % 3;
      s.incentives->issue_token(uid, "VoluntaryTest", amount);
      issued += static_cast<std::int64_t>(amount);
    } else {
      static const char* benefits[] = {"tax_rebate", "ration_pack", "water_bill", "no_such"};
      bool must_fail = false;
      std::string who = uid, benefit = benefits[rng() % 4];
      if (roll == 9) {
        // Guaranteed failure: a pauper, a disabled benefit or an unknown one.
        must_fail = true;
        ++forced;
        const auto pick = rng() % 3;
        if (pick == 0) who = pauper, benefit = "ration_pack";
        else if (pick == 1) benefit = "water_bill";
        else benefit = "no_such";
      }
      const auto blocks = s.ledger.size();
      const auto events = s.ledger.events().size();
      try {
        const auto r = s.incentives->redeem_tokens(who, benefit);
        redeemed += static_cast<std::int64_t>(r.cost);
        ++ok_redeems;
        if (must_fail) note("guaranteed-failing redemption succeeded at op " + std::to_string(op));
      } catch (const Error&) {
        ++failed_redeems;
        if (s.ledger.size() != blocks || s.ledger.events().size() != events)
          note("failed redemption appended events at op " + std::to_string(op));
      }
    }

    if (op % kTokenCheckpoint == 0) {
      ++checkpoints;
      const auto st = s.engine->snapshot();
      std::int64_t balances = 0;
      for (const auto& [id, a] : st.accounts) {
        if (a.lifetime_redeemed > a.lifetime_issued ||
            a.balance != a.lifetime_issued - a.lifetime_redeemed)
          note("negative or inconsistent balance for " + id);
        balances += static_cast<std::int64_t>(a.balance);
      }
      if (balances != issued - redeemed)
        note("checkpoint " + std::to_string(op) + ": balances " + std::to_string(balances) +
             " != issued - redeemed " + std::to_string(issued - redeemed));
      if (chain_net_tokens(s.ledger) != balances)
        note("checkpoint " + std::to_string(op) + ": chain totals disagree with balances");
      if (st.accounts.at(pauper).balance != 0) note("pauper gained a balance");
    }
  }
  const auto secs = since(t0);
  if (secs >= kTokenSeconds) note("too slow");
  if (failed_redeems < forced) note("fewer failures than guaranteed failures");

  std::ostringstream d;
  d << kTokenOps << " ops, " << checkpoints << " checkpoints, issued " << issued << ", redeemed "
    << redeemed << ", " << ok_redeems << " redemptions ok, " << failed_redeems << " failed ("
    << forced << " forced)";
  for (const auto& p : problems) d << "; " << p;
  d << ", " << fmt(secs) << " (limit " << kTokenSeconds << "s)";
  return {problems.empty() && ok_redeems > 0, d.str()};
}

// Volunteer flow -------------------------------------------------------

Outcome volunteer_flow() {
  TempDir dir;
  Stack s(dir.path(), 8);
  std::vector<std::string> problems;
  std::string uid;
  for (std::size_t call = 1; call <= kVolunteerCalls; ++call) {
    const auto before = s.ledger.size();
    VolunteerRef who;
    who.passport = "VOL-001";
    const auto out = s.incentives->run_volunteer_flow(who, "VoluntaryTest");
    if (s.ledger.size() != before + 1) {
      problems.push_back("call " + std::to_string(call) + " appended " +
                         std::to_string(s.ledger.size() - before) + " blocks");
      continue;
    }
    const auto block = s.ledger.get_block(before);
    std::vector<ledger::EventKind> kinds;
    for (const auto& e : block.events) {
      kinds.push_back(e.kind);
      if (e.subject_uid != out.user.uid) problems.push_back("event subject is not the volunteer");
    }
    if (call == 1) {
      uid = out.user.uid;
      const std::vector<ledger::EventKind> want{ledger::EventKind::Register,
                                                ledger::EventKind::TokenIssue};
      if (!out.created || kinds != want)
        problems.push_back("first call did not write exactly Register + TokenIssue");
    } else {
      if (out.created || out.user.uid != uid) problems.push_back("repeat call did not reuse the uid");
      if (kinds != std::vector<ledger::EventKind>{ledger::EventKind::TokenIssue})
        problems.push_back("repeat call " + std::to_string(call) +
                           " did not write exactly one TokenIssue");
    }
    if (out.account.balance != call) problems.push_back("balance after call " + std::to_string(call));
  }
  const auto registers = s.ledger.events({ledger::EventKind::Register, uid}).size();
  const auto issues = s.ledger.events({ledger::EventKind::TokenIssue, uid}).size();
  const auto balance = s.incentives->account(uid).balance;
  if (registers != 1 || issues != kVolunteerCalls || balance != kVolunteerCalls)
    problems.push_back("final counts wrong");

  std::ostringstream d;
  d << kVolunteerCalls << " calls: " << registers << " Register, " << issues
    << " TokenIssue, balance " << balance;
  for (const auto& p : problems) d << "; " << p;
  return {problems.empty(), d.str()};
}

// Replication ----------------------------------------------------------

Outcome replication() {
  TempDir adir, rdir;
  const auto t0 = Clock::now();
  node::Node authority(authority_config(adir.path()));
  authority.start();
  node::Node replica(replica_config(rdir.path(), authority.base_url(), kReplicationPollSeconds));
  replica.start();

  for (std::size_t i = 0; i < kReplicationBlocks; ++i)
    authority.registry().register_user("R" + std::to_string(i));
  const auto written = Clock::now();
  const auto target = authority.ledger().head();
  const bool converged = wait_for([&] { return replica.ledger().head() == target; },
                                  std::chrono::milliseconds(static_cast<int>(kConvergeSeconds * 1000)));
  const auto lag = since(written);
  const bool same_state =
      replica.engine().snapshot().serialize() == authority.engine().snapshot().serialize();

  // A block at head + 1 signed by a key that is not the authority's.
  const auto head = *replica.ledger().head();
  auto frames = frames_with_forgery(authority.ledger(), authority.ledger().size());
  ledger::Block forged;
  forged.height = head.height + 1;
  forged.prev_hash = head.block_hash;
  ledger::EventId id{};
  id.fill(0x5A);
  forged.events = {ledger::make_event(id, "IN-FORGEDAAAAAA",
                                      ledger::RegisterPayload{"FORGED", "", ""}, system_now())};
  forged.events_root = ledger::compute_events_root(forged.events);
  forged.timestamp = system_now();
  forged.authority_id = authority.ledger().authority_id();
  ledger::seal_block(forged, test_key(0x66));
  frames.push_back(ledger::encode_block(forged));
  FakePeer fake(frames);

  std::string rejection = "accepted";
  try {
    replica.sync_once(fake.url());
  } catch (const Error& e) {
    rejection = std::string(code_name(e.code()));
  }
  const bool kept_head = replica.ledger().head() == head;
  const bool no_forged_user = !replica.registry().find_by_passport("FORGED");
  const bool still_valid = replica.ledger().verify_all().ok();
  replica.stop();
  authority.stop();
  const auto secs = since(t0);

  std::ostringstream d;
  d << "replica reached height " << target->height << (converged ? " " : " NOT ") << "within "
    << fmt(lag) << " of the last write (limit " << kConvergeSeconds << "s)"
    << (same_state ? "" : ", state differs") << "; forged block at " << forged.height << " -> "
    << rejection << (kept_head ? ", head kept" : ", HEAD MOVED")
    << (no_forged_user && still_valid ? "" : ", forged data visible") << ", " << fmt(secs)
    << " total (limit " << kReplicationSeconds << "s)";
  return {converged && same_state && rejection == "INVALID_BLOCK" && kept_head && no_forged_user &&
              still_valid && secs < kReplicationSeconds,
          d.str()};
}

// Verification flow ----------------------------------------------------

Outcome verification_flow() {
  TempDir dir;
  node::Node n(authority_config(dir.path()));
  n.start();
  httplib::Client c(n.base_url());
  auto post = [&](const std::string& path, const json& body) {
    return body_of(c.Post(path, bearer(), body.dump(), "application/json"));
  };

  const auto uid = post("/users", {{"passport_number", "V-7"}})["user"]["uid"].get<std::string>();
  post("/users/" + uid + "/band", {{"band", "Amber"}, {"reason", "contact"}});
  const auto red = post("/users/" + uid + "/band",
                        {{"band", "Red"}, {"reason", "positive"}, {"confirmed_positive", true}});
  const auto v = body_of(c.Get("/verify?uid=" + uid));
  const auto head = *n.ledger().head();
  n.stop();

  std::set<std::string> keys;
  for (const auto& [k, _] : v.items()) keys.insert(k);
  const std::set<std::string> want{"uid", "band", "band_reason", "as_of_block", "chain_head_hash"};
  const bool types = v.value("uid", json()).is_string() && v.value("band", json()).is_string() &&
                     v.value("band_reason", json()).is_string() &&
                     v.value("as_of_block", json()).is_number_unsigned() &&
                     v.value("chain_head_hash", json()).is_string() &&
                     v["chain_head_hash"].get<std::string>().size() == 64;
  const bool pinned = types && v["as_of_block"] == head.height &&
                      v["as_of_block"] == red["block_height"] &&
                      v["chain_head_hash"] == crypto::to_hex(head.block_hash);
  const bool red_ok = types && v["band"] == "Red" && v["uid"] == uid;

  std::ostringstream d;
  d << "band " << v.value("band", json()).dump() << ", as_of_block "
    << v.value("as_of_block", json()).dump() << " (head " << head.height << "), "
    << keys.size() << " fields" << (keys == want ? "" : " (wrong field set)")
    << (types ? "" : " (wrong types)");
  return {red_ok && pinned && keys == want, d.str()};
}

}  // namespace
}  // namespace pl::test

int main() {
  using namespace pl::test;
  spdlog::set_level(spdlog::level::warn);
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"tamper evidence", tamper_evidence},
      {"replay determinism", replay_determinism},
      {"exposure oracle equivalence", exposure_oracle},
      {"token conservation", token_conservation},
      {"volunteer flow", volunteer_flow},
      {"replication convergence and safety", replication},
      {"verification flow", verification_flow},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] " << index << " " << name << ": "
              << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failed ? 1 : 0;
}
