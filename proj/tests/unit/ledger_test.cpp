#include <gtest/gtest.h>

#include <random>

#include "files.hpp"
#include "harness.hpp"
#include "pl/ledger/block.hpp"
#include "pl/ledger/ledger.hpp"
#include "pl/ledger/payloads.hpp"

namespace pl::ledger {
namespace {

using test::TempDir;

class LedgerTest : public ::testing::Test {
 protected:
  Event random_event(std::optional<EventKind> kind = std::nullopt) {
    EventId id{};
    for (auto& b : id) b = static_cast<std::uint8_t>(rng_());
    const auto k = kind ? *kind : (rng_() % 2 ? EventKind::TokenIssue : EventKind::LocationUpdate);
    const std::string uid = "IN-USER" + std::to_string(rng_() % 5);
    if (k == EventKind::TokenIssue)
      return make_event(id, uid, TokenIssuePayload{"VoluntaryTest", 1 + rng_() % 9}, ts_++);
    if (k == EventKind::HotspotIngest)
      return make_event(id, std::nullopt,
                        HotspotIngestPayload{"DEL", CalendarDate::from_days(18322), 3, "who"},
                        ts_++);
    return make_event(id, uid, LocationUpdatePayload{"loc " + std::to_string(rng_() % 100)},
                      ts_++);
  }

  std::vector<Event> random_batch(std::size_t n) {
    std::vector<Event> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_event());
    return out;
  }

  /// Genesis plus `blocks - 1` blocks of 1..`per_block` events.
  void build(Ledger& l, std::size_t blocks, std::size_t per_block = 5) {
    l.append_block({test::config_event(key_.public_key())});
    for (std::size_t i = 1; i < blocks; ++i) l.append_block(random_batch(1 + rng_() % per_block));
  }

  std::mt19937_64 rng_{42};
  Timestamp ts_ = 1'600'000'000;
  crypto::SigningKey key_ = test::test_key();
  TempDir dir_;
};

TEST_F(LedgerTest, GenesisHasZeroPrevHash) {
  Ledger l(dir_.path(), test::authority_options(key_));
  const auto b = l.append_block({test::config_event(key_.public_key())});
  EXPECT_EQ(b.height, 0u);
  EXPECT_EQ(b.prev_hash, crypto::Digest{});
  EXPECT_EQ(l.head()->height, 0u);
  EXPECT_EQ(l.get_block(0), b);
}

TEST_F(LedgerTest, BlocksLinkToPredecessor) {
  Ledger l(dir_.path(), test::authority_options(key_));
  const auto g = l.append_block({test::config_event(key_.public_key())});
  const auto b = l.append_block(random_batch(3));
  EXPECT_EQ(b.height, 1u);
  EXPECT_EQ(b.prev_hash, g.block_hash);
  EXPECT_EQ(b.prev_hash, compute_block_hash(l.get_block(0)));
}

TEST_F(LedgerTest, EventsReadBackByteIdentical) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 1);
  const auto e = random_event(EventKind::TokenIssue);
  l.append_block({e});
  const auto stored = l.get_block(1).events.at(0);
  EXPECT_EQ(encode_event(stored), encode_event(e));
  EXPECT_EQ(payload_as<TokenIssuePayload>(stored), payload_as<TokenIssuePayload>(e));
}

TEST_F(LedgerTest, GetBlockPastHeadIsNotFound) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 1);
  try {
    l.get_block(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotFound);
  }
}

TEST_F(LedgerTest, FiftyBlocksRehash) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 50);
  crypto::Digest prev{};
  for (Height h = 0; h < 50; ++h) {
    const auto b = l.get_block(h);
    EXPECT_EQ(compute_block_hash(b), b.block_hash);
    EXPECT_EQ(b.prev_hash, prev);
    EXPECT_EQ(compute_events_root(b.events), b.events_root);
    EXPECT_TRUE(crypto::verify(key_.public_key(), signing_message(b), b.signature));
    prev = b.block_hash;
  }
}

TEST_F(LedgerTest, FrameEncodingIsCanonical) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 10);
  for (Height h = 0; h < 10; ++h) {
    const auto frame = l.get_frame(h);
    EXPECT_EQ(encode_block(decode_block(frame)), frame);
  }
}

TEST_F(LedgerTest, AppendIsRejectedWithoutEventsOrKey) {
  Ledger l(dir_.path(), test::authority_options(key_));
  try {
    l.append_block({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyBatch);
  }
  TempDir other;
  Ledger replica(other.path(), test::replica_options(key_.public_key()));
  try {
    replica.append_block(random_batch(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotAuthority);
  }
}

TEST_F(LedgerTest, DuplicateEventIdRejected) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 1);
  const auto e = random_event();
  l.append_block({e});
  try {
    l.append_block({e});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::InvalidEvent);
  }
  EXPECT_EQ(l.size(), 2u);
}

TEST_F(LedgerTest, OversizedBatchRejected) {
  Ledger l(dir_.path(), test::authority_options(key_, 4));
  EXPECT_THROW(l.append_block(random_batch(5)), Error);
  EXPECT_NO_THROW(l.append_block(random_batch(4)));
}

TEST_F(LedgerTest, UntamperedChainVerifies) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 100);
  const auto r = l.verify_chain(0, 99);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.checked, 100u);
  EXPECT_TRUE(l.verify_chain(40, 60).ok());
  EXPECT_THROW(l.verify_chain(0, 100), Error);
  EXPECT_THROW(l.verify_chain(5, 4), Error);
}

TEST_F(LedgerTest, EveryByteFlipIsDetected) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 6, 3);
  const auto log = dir_.path() / "chain.log";
  const auto spans = test::frame_spans(l);
  for (Height h = 0; h < spans.size(); ++h) {
    for (auto off = spans[h].first; off < spans[h].second; ++off) {
      test::flip_byte(log, off, 0x01);
      const auto r = l.verify_all();
      test::flip_byte(log, off, 0x01);
      ASSERT_FALSE(r.ok()) << "undetected flip at block " << h << " offset " << off;
      EXPECT_LE(r.failure->height, h);
    }
  }
  EXPECT_TRUE(l.verify_all().ok());
}

TEST_F(LedgerTest, PayloadFlipIsHashMismatchAtThatHeight) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 10);
  // The first payload byte of block 7's first event sits a fixed distance
  // into the frame: prefix, height, prev, count, event length, id, kind,
  // subject flag+len+uid, payload length.
  const auto block = l.get_block(7);
  const auto& e = block.events.at(0);
  const auto spans = test::frame_spans(l);
  const std::uint64_t payload_at = spans[7].first + 4 + 8 + 32 + 4 + 4 + 16 + 1 + 1 + 4 +
                                   e.subject_uid->size() + 4;
  ASSERT_EQ(test::read_byte(dir_.path() / "chain.log", payload_at), e.payload.at(0));
  test::flip_byte(dir_.path() / "chain.log", payload_at);
  const auto r = l.verify_all();
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.failure->height, 7u);
  EXPECT_EQ(r.failure->kind, FailureClass::HashMismatch);
}

TEST_F(LedgerTest, ForeignSignatureIsBadSignature) {
  Ledger l(dir_.path(), test::authority_options(key_));
  build(l, 6);
  // Re-sign block 3 with another key and rehash, so only the signature
  // check can notice.
  auto forged = l.get_block(3);
  seal_block(forged, test::test_key(99));
  ASSERT_EQ(encode_block(forged).size(), l.get_frame(3).size());
  test::write_bytes(dir_.path() / "chain.log", test::frame_spans(l)[3].first + 4,
                    encode_block(forged));
  const auto r = l.verify_all();
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.failure->height, 3u);
  EXPECT_EQ(r.failure->kind, FailureClass::BadSignature);
}

TEST_F(LedgerTest, ReopenRestoresHead) {
  ChainHead before;
  {
    Ledger l(dir_.path(), test::authority_options(key_));
    build(l, 20);
    before = *l.head();
  }
  Ledger l(dir_.path(), test::authority_options(key_));
  EXPECT_EQ(*l.head(), before);
  EXPECT_TRUE(l.verify_all().ok());
  EXPECT_EQ(l.append_block(random_batch(2)).prev_hash, before.block_hash);
}

TEST_F(LedgerTest, TornTailIsTruncatedOnOpen) {
  const auto log = dir_.path() / "chain.log", idx = dir_.path() / "chain.idx";
  std::uint64_t log_size;
  {
    Ledger l(dir_.path(), test::authority_options(key_));
    build(l, 3);
    log_size = std::filesystem::file_size(log);
  }
  // A frame that made it to the log but not the index, plus half an index record.
  {
    std::ofstream out(log, std::ios::binary | std::ios::app);
    out << std::string("\x00\x00\x00\x10partial-frame", 17);
    std::ofstream io(idx, std::ios::binary | std::ios::app);
    io << std::string(7, '\x01');
  }
  Ledger l(dir_.path(), test::authority_options(key_));
  EXPECT_EQ(l.size(), 3u);
  EXPECT_EQ(std::filesystem::file_size(log), log_size);
  EXPECT_EQ(std::filesystem::file_size(idx), 3u * 16);
  EXPECT_TRUE(l.verify_all().ok());
  l.append_block(random_batch(1));
  EXPECT_TRUE(l.verify_all().ok());
}

TEST_F(LedgerTest, InconsistentIndexRefusesToOpen) {
  {
    Ledger l(dir_.path(), test::authority_options(key_));
    build(l, 3);
  }
  test::flip_byte(dir_.path() / "chain.idx", 16 + 15);  // offset of block 1
  try {
    Ledger l(dir_.path(), test::authority_options(key_));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CorruptStore);
  }
}

TEST_F(LedgerTest, EventFiltersMatchBruteForce) {
  Ledger l(dir_.path(), test::authority_options(key_));
  EXPECT_TRUE(l.events().empty());
  build(l, 30, 8);
  l.append_block({random_event(EventKind::HotspotIngest)});

  std::vector<Event> all;
  for (Height h = 0; h < l.size(); ++h)
    for (const auto& e : l.get_block(h).events) all.push_back(e);
  EXPECT_EQ(l.events(), all);

  auto brute = [&](const EventFilter& f) {
    std::vector<Event> out;
    for (const auto& e : all)
      if ((!f.kind || e.kind == *f.kind) && (!f.subject_uid || e.subject_uid == f.subject_uid))
        out.push_back(e);
    return out;
  };
  for (auto kind : {EventKind::TokenIssue, EventKind::LocationUpdate, EventKind::HotspotIngest,
                    EventKind::Register}) {
    const EventFilter f{kind, std::nullopt};
    EXPECT_EQ(l.events(f), brute(f));
  }
  const EventFilter by_user{std::nullopt, std::string("IN-USER3")};
  const auto mine = l.events(by_user);
  EXPECT_FALSE(mine.empty());
  EXPECT_EQ(mine, brute(by_user));
  const EventFilter both{EventKind::TokenIssue, std::string("IN-USER3")};
  EXPECT_EQ(l.events(both), brute(both));
}

TEST_F(LedgerTest, AppendVerifiedAcceptsOnlyAuthorityBlocks) {
  Ledger auth(dir_.path(), test::authority_options(key_));
  build(auth, 5);
  TempDir rdir;
  Ledger replica(rdir.path(), test::replica_options(key_.public_key()));
  for (Height h = 0; h < 3; ++h) replica.append_verified(auth.get_block(h));

  auto skipped = auth.get_block(4);
  EXPECT_THROW(replica.append_verified(skipped), Error);

  auto forged = auth.get_block(3);
  seal_block(forged, test::test_key(5));
  try {
    replica.append_verified(forged);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidBlock);
  }
  EXPECT_EQ(replica.head()->height, 2u);
  replica.append_verified(auth.get_block(3));
  replica.append_verified(auth.get_block(4));
  EXPECT_EQ(replica.head(), auth.head());
}

}  // namespace
}  // namespace pl::ledger
