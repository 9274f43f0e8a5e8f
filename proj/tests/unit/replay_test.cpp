#include <gtest/gtest.h>

#include "harness.hpp"
#include "workload.hpp"
#include "pl/ledger/payloads.hpp"

namespace pl {
namespace {

using test::Stack;
using test::TempDir;

TEST(Replay, EmptyChainHasNoUsers) {
  TempDir dir;
  ledger::Ledger l(dir.path(), test::authority_options(test::test_key()));
  const auto s = replay(l);
  EXPECT_TRUE(s.users.empty());
  EXPECT_FALSE(s.height);
}

TEST(Replay, MatchesIncrementalStateAndModel) {
  TempDir dir;
  Stack s(dir.path());
  s.incentives->load_policy(test::kTestPolicy);
  test::Workload w(s, 2024);
  w.run(1500);
  EXPECT_TRUE(w.surprises().empty()) << w.surprises().front();
  EXPECT_GT(w.rejected(), 0u);

  const auto incremental = s.engine->snapshot();
  const auto replayed = replay(s.ledger);
  EXPECT_EQ(test::diff(w.model(), incremental), "");
  EXPECT_EQ(test::diff(w.model(), replayed), "");
  EXPECT_TRUE(incremental == replayed);
  EXPECT_EQ(incremental.serialize(), replayed.serialize());
  EXPECT_EQ(replay(s.ledger).serialize(), replayed.serialize());
}

TEST(Replay, SurvivesRestart) {
  TempDir dir;
  Bytes before;
  {
    Stack s(dir.path());
    s.incentives->load_policy(test::kTestPolicy);
    test::Workload w(s, 5);
    w.run(300);
    before = s.engine->snapshot().serialize();
  }
  Stack s(dir.path());
  EXPECT_EQ(s.engine->snapshot().serialize(), before);
}

class ForgedChain : public ::testing::Test {
 protected:
  ledger::Event event(std::optional<std::string> subject, const ledger::Payload& p) {
    ledger::EventId id{};
    id[0] = ++counter_;
    return ledger::make_event(id, std::move(subject), p, 1'600'000'000 + counter_);
  }

  void expect_conflict(std::vector<ledger::Event> events) {
    ledger::Ledger l(dir_.path(), test::authority_options(key_));
    l.append_block({test::config_event(key_.public_key())});
    l.append_block(std::move(events));
    try {
      replay(l);
      FAIL() << "replay accepted a conflicting chain";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ReplayConflict);
      EXPECT_TRUE(e.details().contains("event_id"));
    }
  }

  std::uint8_t counter_ = 0;
  crypto::SigningKey key_ = test::test_key();
  TempDir dir_;
};

TEST_F(ForgedChain, DuplicatePassport) {
  expect_conflict({event("IN-AAAAAAAAAAAA", ledger::RegisterPayload{"P1", "", ""}),
                   event("IN-BBBBBBBBBBBB", ledger::RegisterPayload{"P1", "", ""})});
}

TEST_F(ForgedChain, IllegalBandPath) {
  expect_conflict({event("IN-AAAAAAAAAAAA", ledger::RegisterPayload{"P1", "", ""}),
                   event("IN-AAAAAAAAAAAA",
                         ledger::BandUpdatePayload{ColourBand::Green, ColourBand::Red, "x",
                                                   false, {}})});
}

TEST_F(ForgedChain, Overdraft) {
  expect_conflict({event("IN-AAAAAAAAAAAA", ledger::RegisterPayload{"P1", "", ""}),
                   event("IN-AAAAAAAAAAAA", ledger::TokenRedeemPayload{"tax_rebate", 1})});
}

TEST_F(ForgedChain, EventForUnknownUser) {
  expect_conflict({event("IN-AAAAAAAAAAAA", ledger::LocationUpdatePayload{"x"})});
}

}  // namespace
}  // namespace pl
