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

#include "lara/wire.h"

#include <gtest/gtest.h>

#include "lara/ca.h"
#include "test_util.h"

namespace lara::wire {
namespace {

Message Msg(uint32_t id, Body body) { return Message{id, std::move(body)}; }

std::string FrameHex(const Message& m) { return ToHex(EncodeFrame(m)); }

TEST(WireGolden, GetAuditStart) {
  EXPECT_EQ(FrameHex(Msg(1, GetAuditStart{})), "00000004" "01" "00000001");
}

TEST(WireGolden, GetBitsSevenPositions) {
  const Bytes frame =
      EncodeFrame(Msg(0x0a0b0c0d, GetBits{{0, 1, 2, 255, 256, 65536, 1ull << 40}}));
  ASSERT_EQ(frame.size(), 4u + 1 + 4 + 2 + 7 * 8);
  EXPECT_EQ(ToHex(frame),
            "0000003e" "03" "0a0b0c0d" "0007"
            "0000000000000000" "0000000000000001" "0000000000000002"
            "00000000000000ff" "0000000000000100" "0000000000010000"
            "0000010000000000");
}

TEST(WireGolden, SmallBodies) {
  EXPECT_EQ(FrameHex(Msg(2, GetFilter{3})), "00000005" "02" "00000002" "03");
  EXPECT_EQ(FrameHex(Msg(3, BitsMsg{{true, false, true, true, false, false, false, false, true}})),
            "00000008" "83" "00000003" "0009" "0d01");
  EXPECT_EQ(FrameHex(Msg(4, GetSegmentProof{0x1234})), "0000000c" "04" "00000004" "0000000000001234");
  EXPECT_EQ(FrameHex(Msg(5, DecisionMsg{Decision::kRejectStaleSeed})), "00000005" "85" "00000005" "02");
  EXPECT_EQ(FrameHex(Msg(6, InstallAck{7})), "0000000c" "86" "00000006" "0000000000000007");
  EXPECT_EQ(FrameHex(Msg(7, RevokedNotice{})), "00000004" "94" "00000007");
  EXPECT_EQ(FrameHex(Msg(8, ErrorMsg{ErrorKind::kNoRlInstalled, "no"})),
            "0000000a" "7f" "00000008" "0003" "0002" "6e6f");
}

// Every message type with randomized contents survives encode/decode.
TEST(Wire, RoundTripEveryType) {
  DeterministicRandom rng(71);
  CertificationAuthority ca(testing::TestKeys(), rng);
  ca.EnrollClient("c");
  const auto issued = ca.IssuePseudonyms("c", 1);
  const RevocationList rl = ca.RevokeClient("c", testing::SmallConfig(RlEncoding::kRedactable));
  const auto& rs = std::get<RedactableBody>(rl.body);

  AuditStart single;
  single.version = 9;
  single.epoch = 2;
  single.seed = RandomSeed(rng);
  single.filters = {{4096, 7, SaltFromU64(0)}};
  AuditStart hbfa = single;
  hbfa.encoding = RlEncoding::kHbfa;
  hbfa.filters = {{512, 5, SaltFromU64(1)}, {1024, 5, SaltFromU64(2)}};
  AuditStart red = single;
  red.encoding = RlEncoding::kRedactable;
  red.root = rs.tree.root();
  red.segment_size_bits = 512;
  red.leaf_count = rs.tree.leaf_count();
  red.root_signature = rs.signature;

  std::vector<bool> bits;
  for (int i = 0; i < 13; ++i) bits.push_back(rng.Uniform(2));
  const std::vector<Body> bodies = {
      GetAuditStart{},
      AuditStartMsg{single},
      AuditStartMsg{hbfa},
      AuditStartMsg{red},
      GetFilter{2},
      FilterMsg{rs.filter.Serialize(), rs.signature},
      GetBits{{1, 2, 3, ~0ull}},
      BitsMsg{bits},
      BitsMsg{},
      GetSegmentProof{77},
      SegmentProofMsg{rs.tree.Prove(0, rs.filter.payload())},
      RevokedNotice{},
      Authenticate{AuthRequest{issued[0].pseudonym, MakeToken(issued[0], rl.seed), rl.seed}},
      DecisionMsg{Decision::kRejectRevoked},
      InstallRl{rl.Serialize()},
      InstallAck{123},
      ErrorMsg{ErrorKind::kWrongVariant, "wrong variant"},
  };
  for (const Body& body : bodies) {
    const Message m = Msg(uint32_t(rng.NextU64()), body);
    const Bytes frame = EncodeFrame(m);
    EXPECT_EQ(DecodeFrame(frame), m) << int(m.type());
    const FrameHeader h = DecodeHeader(frame);
    EXPECT_EQ(h.type, m.type());
    EXPECT_EQ(h.payload_length, frame.size() - kFrameHeaderSize);
  }
}

TEST(Wire, OversizeRejectedFromHeaderAlone) {
  // Only the five header bytes are supplied: a decoder that allocated first
  // would trip over the missing body instead.
  const Bytes header = {0x10, 0x00, 0x00, 0x01, 0x01};
  try {
    DecodeHeader(header);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMalformedFrame);
  }
  const Bytes at_limit = {0x10, 0x00, 0x00, 0x00, 0x01};
  EXPECT_EQ(DecodeHeader(at_limit).payload_length, kMaxPayload);
}

TEST(Wire, UnknownTypeAndShortFrames) {
  try {
    DecodeFrame(Bytes{0, 0, 0, 4, 0x42, 0, 0, 0, 1});
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownType);
  }
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0}), ProtocolError);
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0, 2, 0x01, 0, 0}), ProtocolError);
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0, 5, 0x01, 0, 0, 0, 1}), ProtocolError);
  // Trailing body bytes on a bodyless message.
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0, 5, 0x01, 0, 0, 0, 1, 9}), ProtocolError);
  // Bits padding must be zero.
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0, 7, 0x83, 0, 0, 0, 1, 0, 1, 0x03}), ProtocolError);
  // Decision codes beyond the defined set.
  EXPECT_THROW(DecodeFrame(Bytes{0, 0, 0, 5, 0x85, 0, 0, 0, 1, 9}), ProtocolError);
}

// Decoding arbitrary bytes either succeeds or throws ProtocolError.
TEST(Wire, FuzzedFramesNeverCrash) {
  DeterministicRandom rng(72);
  const Bytes seedframe = EncodeFrame(Msg(1, GetBits{{1, 2, 3}}));
  const uint8_t types[] = {0x01, 0x81, 0x02, 0x82, 0x03, 0x83, 0x04, 0x84,
                           0x94, 0x05, 0x85, 0x06, 0x86, 0x7f, 0x00, 0xff};
  int decoded = 0;
  for (int i = 0; i < 100000; ++i) {
    Bytes f;
    if (i % 2 == 0) {
      f = seedframe;
      for (int j = 0, n = 1 + int(rng.Uniform(4)); j < n; ++j) {
        f[rng.Uniform(f.size())] = uint8_t(rng.NextU64());
      }
    } else {
      const size_t body = rng.Uniform(200);
      f.resize(kFrameHeaderSize + 4 + body);
      rng.Fill(f);
      const uint32_t len = uint32_t(4 + body);
      f[0] = uint8_t(len >> 24);
      f[1] = uint8_t(len >> 16);
      f[2] = uint8_t(len >> 8);
      f[3] = uint8_t(len);
      f[4] = types[rng.Uniform(sizeof types)];
    }
    try {
      const Message m = DecodeFrame(f);
      ++decoded;
      EXPECT_EQ(DecodeFrame(EncodeFrame(m)), m);
    } catch (const ProtocolError&) {
    }
  }
  EXPECT_GT(decoded, 0);
}

}  // namespace
}  // namespace lara::wire
