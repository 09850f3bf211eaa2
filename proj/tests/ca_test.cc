// Copyright 2026 The LARA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lara/ca.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "lara/ca_journal.h"
#include "test_util.h"

namespace lara {
namespace {

using testing::SmallConfig;
using testing::TestKeys;

class CaTest : public ::testing::Test {
 protected:
  CaTest() : rng_(41), ca_(TestKeys(), rng_) {}

  void Enroll(int n, uint32_t per_client) {
    for (int i = 0; i < n; ++i) {
      ca_.EnrollClient("c" + std::to_string(i));
      ca_.IssuePseudonyms("c" + std::to_string(i), per_client);
    }
  }

  DeterministicRandom rng_;
  CertificationAuthority ca_;
};

TEST_F(CaTest, Enrollment) {
  ca_.EnrollClient("a");
  EXPECT_TRUE(ca_.IsEnrolled("a"));
  EXPECT_FALSE(ca_.IsEnrolled("b"));
  try {
    ca_.EnrollClient("a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlreadyExists);
  }
  EXPECT_THROW(ca_.EnrollClient(""), Error);
}

TEST_F(CaTest, IssuanceProducesValidDistinctPseudonyms) {
  ca_.EnrollClient("a");
  const auto first = ca_.IssuePseudonyms("a", 10);
  const auto second = ca_.IssuePseudonyms("a", 10);
  ASSERT_EQ(first.size(), 10u);
  std::set<PublicKey> keys;
  for (const auto* batch : {&first, &second}) {
    for (const auto& p : *batch) {
      EXPECT_TRUE(ValidatePseudonym(ca_.public_key(), p.pseudonym, 0));
      EXPECT_EQ(p.secret_key.public_key(), p.pseudonym.public_key);
      keys.insert(p.pseudonym.public_key);
    }
  }
  EXPECT_EQ(keys.size(), 20u);
  EXPECT_EQ(ca_.pseudonyms_of("a").size(), 20u);
}

TEST_F(CaTest, IssuanceErrors) {
  try {
    ca_.IssuePseudonyms("ghost", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  ca_.EnrollClient("a");
  ca_.IssuePseudonyms("a", 1);
  ca_.RevokeClient("a", SmallConfig(RlEncoding::kSingle));
  try {
    ca_.IssuePseudonyms("a", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPermissionDenied);
  }
}

TEST_F(CaTest, RevokedTokensAreMembersUnderNewSeed) {
  Enroll(2, 100);
  const RevocationList first = ca_.RevokeClient("c0", SmallConfig(RlEncoding::kSingle));
  for (const auto& p : ca_.pseudonyms_of("c0")) {
    EXPECT_TRUE(RlMembership(first, EncodeToken(MakeToken(p, first.seed))));
  }
  const RevocationList second = ca_.RevokeClient("c1", SmallConfig(RlEncoding::kSingle));
  EXPECT_NE(first.seed, second.seed);
  EXPECT_GT(second.version, first.version);
  for (const char* id : {"c0", "c1"}) {
    for (const auto& p : ca_.pseudonyms_of(id)) {
      EXPECT_TRUE(RlMembership(second, EncodeToken(MakeToken(p, second.seed))));
    }
  }
  EXPECT_EQ(ca_.revoked_pseudonyms().size(), 200u);
}

TEST_F(CaTest, SizingFollowsOptimalParams) {
  RlConfig c;
  c.target_fp = 1e-4;
  c.min_capacity = 1;
  DeterministicRandom rng(1);
  const auto tokens = testing::RandomTokens(1000, rng);
  const RevocationList rl = AssembleRl(tokens, RandomSeed(rng), 1, 0, c, TestKeys().secret, rng);
  EXPECT_EQ(rl.AuthoritativeFilter().params(), OptimalParams(1000, 1e-4));
  // Default minimum capacity bounds small lists from below.
  EXPECT_EQ(AuthoritativeParams(RlConfig{}, 10), OptimalParams(1024, 1e-4));
  RlConfig fixed;
  fixed.fixed_n_bits = 4096;
  fixed.k = 3;
  EXPECT_EQ(AuthoritativeParams(fixed, 10), (FilterParams{4096, 3}));
}

TEST_F(CaTest, HbfaLevelsHalve) {
  RlConfig c = SmallConfig(RlEncoding::kHbfa);
  c.levels = 4;
  c.reduction_factor = 2;
  Enroll(1, 30);
  const RevocationList rl = ca_.RevokeClient("c0", c);
  const auto& filters = std::get<HbfaBody>(rl.body).filters;
  ASSERT_EQ(filters.size(), 4u);
  const uint64_t s = filters[3].n_bits();
  EXPECT_EQ(filters[2].n_bits(), s / 2);
  EXPECT_EQ(filters[1].n_bits(), s / 4);
  EXPECT_EQ(filters[0].n_bits(), s / 8);
  for (const auto& p : ca_.pseudonyms_of("c0")) {
    const EncodedToken t = EncodeToken(MakeToken(p, rl.seed));
    for (const auto& f : filters) EXPECT_TRUE(f.Contains(t.value.view()));
  }
}

TEST_F(CaTest, HbfaSingleLevelMatchesSingleFilter) {
  RlConfig h = SmallConfig(RlEncoding::kHbfa);
  h.levels = 1;
  DeterministicRandom rng(2);
  const auto tokens = testing::RandomTokens(40, rng);
  const Seed seed = RandomSeed(rng);
  const RevocationList a = AssembleRl(tokens, seed, 1, 0, h, TestKeys().secret, rng);
  const RevocationList b =
      AssembleRl(tokens, seed, 1, 0, SmallConfig(RlEncoding::kSingle), TestKeys().secret, rng);
  EXPECT_EQ(a.AuthoritativeFilter().payload().size(), b.AuthoritativeFilter().payload().size());
  EXPECT_EQ(a.AuthoritativeFilter().params(), b.AuthoritativeFilter().params());
  for (const auto& t : tokens) EXPECT_TRUE(RlMembership(a, t));
}

TEST_F(CaTest, ConfigValidation) {
  RlConfig c;
  c.encoding = RlEncoding::kRedactable;
  c.segment_size_bits = 500;
  EXPECT_THROW(c.Validate(), Error);
  c.segment_size_bits = 512;
  EXPECT_NO_THROW(c.Validate());
  RlConfig h;
  h.encoding = RlEncoding::kHbfa;
  h.reduction_factor = 1;
  EXPECT_THROW(h.Validate(), Error);
  h.reduction_factor = 2;
  h.levels = 0;
  EXPECT_THROW(h.Validate(), Error);
  RlConfig p;
  p.target_fp = 1.0;
  EXPECT_THROW(p.Validate(), Error);
}

TEST_F(CaTest, RedactableEmptyListIsAllZero) {
  const RevocationList rl = ca_.PublishRl(SmallConfig(RlEncoding::kRedactable));
  const auto& body = std::get<RedactableBody>(rl.body);
  EXPECT_EQ(body.filter.PopCount(), 0u);
  for (uint64_t i = 0; i < body.tree.leaf_count(); ++i) {
    const SegmentProof proof = body.tree.Prove(i, body.filter.payload());
    EXPECT_TRUE(VerifySegment(body.tree.root(), proof, body.tree.leaf_count()));
    for (uint8_t b : proof.segment) EXPECT_EQ(b, 0);
  }
}

TEST_F(CaTest, PublishedSeedCannotBeReused) {
  const RevocationList rl = ca_.PublishRl(SmallConfig(RlEncoding::kSingle));
  EXPECT_THROW(ca_.BuildRlSingle({}, rl.seed, SmallConfig(RlEncoding::kSingle)), Error);
}

TEST_F(CaTest, PrecomputeSignsOnlyNewClient) {
  Enroll(5, 7);
  ca_.RevokeClient("c0", SmallConfig(RlEncoding::kSingle));
  ca_.RevokeClient("c1", SmallConfig(RlEncoding::kSingle));
  EXPECT_EQ(ca_.stats().last_publish_token_signatures, 14u);
  ca_.PrecomputeNext();
  ASSERT_TRUE(ca_.precomputed());
  const Seed draft = ca_.precomputed()->seed;
  const RevocationList rl = ca_.RevokeClient("c2", SmallConfig(RlEncoding::kSingle));
  EXPECT_EQ(rl.seed, draft);
  EXPECT_EQ(ca_.stats().last_publish_token_signatures, 7u);
  for (const auto& p : ca_.revoked_pseudonyms()) {
    EXPECT_TRUE(RlMembership(rl, EncodeToken(MakeToken(p, rl.seed))));
  }
  EXPECT_FALSE(ca_.precomputed());
}

TEST_F(CaTest, AutoPrecomputeKeepsDraftFresh) {
  Enroll(4, 3);
  ca_.set_auto_precompute(true);
  ca_.PrecomputeNext();
  std::set<Seed> seeds;
  for (int i = 0; i < 4; ++i) {
    seeds.insert(ca_.precomputed()->seed);
    const RevocationList rl = ca_.RevokeClient("c" + std::to_string(i), SmallConfig(RlEncoding::kSingle));
    EXPECT_EQ(ca_.stats().last_publish_token_signatures, 3u);
    EXPECT_TRUE(seeds.contains(rl.seed));
    ASSERT_TRUE(ca_.precomputed());
    EXPECT_FALSE(seeds.contains(ca_.precomputed()->seed));
  }
}

TEST_F(CaTest, PrecomputeOnEmptySetReservesSeed) {
  ca_.PrecomputeNext();
  const Seed a = ca_.precomputed()->seed;
  EXPECT_TRUE(ca_.precomputed()->encoded_tokens.empty());
  ca_.PrecomputeNext();
  EXPECT_NE(ca_.precomputed()->seed, a);
}

TEST_F(CaTest, AdvanceEpoch) {
  Enroll(2, 3);
  const auto old = ca_.pseudonyms_of("c1");
  const RevocationList before = ca_.RevokeClient("c0", SmallConfig(RlEncoding::kSingle));
  ca_.AdvanceEpoch();
  EXPECT_EQ(ca_.current_epoch(), 1u);
  EXPECT_FALSE(ValidatePseudonym(ca_.public_key(), old[0].pseudonym, ca_.current_epoch()));
  EXPECT_TRUE(ca_.revoked_pseudonyms().empty());
  const RevocationList after = ca_.PublishRl(SmallConfig(RlEncoding::kSingle));
  EXPECT_EQ(after.AuthoritativeFilter().PopCount(), 0u);
  EXPECT_GT(after.version, before.version);
  EXPECT_EQ(after.epoch, 1u);
}

// No two RLs or drafts ever share a seed.
TEST_F(CaTest, SeedFreshnessProperty) {
  Enroll(20, 2);
  std::set<Seed> seen;
  DeterministicRandom ops(5);
  int next = 0;
  for (int step = 0; step < 200; ++step) {
    switch (ops.Uniform(4)) {
      case 0:
        ca_.PrecomputeNext();
        EXPECT_TRUE(seen.insert(ca_.precomputed()->seed).second);
        break;
      case 1:
        if (next < 20) {
          const Seed draft = ca_.precomputed() ? ca_.precomputed()->seed : Seed{};
          const RevocationList rl = ca_.RevokeClient("c" + std::to_string(next++), SmallConfig(RlEncoding::kSingle));
          if (rl.seed != draft) {
            EXPECT_TRUE(seen.insert(rl.seed).second);
          }
        }
        break;
      case 2: {
        const Seed draft = ca_.precomputed() ? ca_.precomputed()->seed : Seed{};
        const RevocationList rl = ca_.PublishRl(SmallConfig(RlEncoding::kSingle));
        if (rl.seed != draft) {
          EXPECT_TRUE(seen.insert(rl.seed).second);
        }
        break;
      }
      default:
        EXPECT_TRUE(seen.insert(ca_.FreshSeed()).second);
    }
  }
}

TEST(CaJournal, ReplayRestoresState) {
  const std::string path = ::testing::TempDir() + "/lara_ca_journal_test.lcj";
  std::remove(path.c_str());
  DeterministicRandom rng(51);
  Seed last_seed;
  std::vector<PseudonymSecret> bob;
  {
    CertificationAuthority ca(TestKeys(), rng);
    JournalFile journal(path);
    journal.Attach(ca);
    ca.EnrollClient("alice");
    ca.EnrollClient("bob");
    ca.IssuePseudonyms("alice", 4);
    bob = ca.IssuePseudonyms("bob", 3);
    ca.RevokeClient("alice", SmallConfig(RlEncoding::kSingle));
    ca.AdvanceEpoch();
    ca.IssuePseudonyms("bob", 2);
    last_seed = ca.RevokeClient("bob", SmallConfig(RlEncoding::kSingle)).seed;
  }
  CertificationAuthority restored(TestKeys(), rng);
  JournalFile journal(path);
  journal.Attach(restored);
  EXPECT_EQ(restored.current_epoch(), 1u);
  EXPECT_EQ(restored.rl_version(), 2u);
  EXPECT_TRUE(restored.IsRevoked("alice"));
  EXPECT_TRUE(restored.IsRevoked("bob"));
  EXPECT_EQ(restored.pseudonyms_of("bob").size(), 2u);
  EXPECT_EQ(restored.revoked_pseudonyms().size(), 2u);
  EXPECT_THROW(restored.BuildRlSingle({}, last_seed, SmallConfig(RlEncoding::kSingle)), Error);
  // New records keep appending after replay.
  restored.EnrollClient("carol");
  CertificationAuthority again(TestKeys(), rng);
  JournalFile(path).Attach(again);
  EXPECT_TRUE(again.IsEnrolled("carol"));
  std::remove(path.c_str());
}

TEST(CaJournal, RecordsRoundTrip) {
  DeterministicRandom rng(52);
  CertificationAuthority ca(TestKeys(), rng);
  std::vector<JournalRecord> records;
  ca.set_journal([&](const JournalRecord& r) { records.push_back(r); });
  ca.EnrollClient("x");
  ca.IssuePseudonyms("x", 2);
  ca.RevokeClient("x", SmallConfig(RlEncoding::kSingle));
  Bytes image = {'L', 'C', 'J', '1'};
  for (const auto& r : records) {
    const Bytes b = EncodeJournalRecord(r);
    image.insert(image.end(), b.begin(), b.end());
  }
  const auto decoded = DecodeJournal(image);
  ASSERT_EQ(decoded.size(), records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(decoded[i].type, records[i].type);
    EXPECT_EQ(decoded[i].client_id, records[i].client_id);
    EXPECT_EQ(decoded[i].issued.size(), records[i].issued.size());
  }
  image.pop_back();
  EXPECT_THROW(DecodeJournal(image), Error);
}

}  // namespace
}  // namespace lara
