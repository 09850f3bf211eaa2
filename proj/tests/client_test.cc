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

#include "lara/client.h"

#include <gtest/gtest.h>

#include <functional>

#include "lara/ca.h"
#include "lara/transport.h"
#include "lara/wallet_file.h"
#include "test_util.h"

namespace lara {
namespace {

using testing::SmallConfig;

// Loopback session whose replies pass through `mutate` first.
class TamperingChannel final : public Channel {
 public:
  TamperingChannel(VerifierService& service, std::function<void(wire::Message&)> mutate)
      : session_(service), mutate_(std::move(mutate)) {}

 protected:
  Bytes RoundTrip(const Bytes& frame) override {
    bool close = false;
    wire::Message reply = wire::DecodeFrame(session_.HandleFrame(frame, &close));
    mutate_(reply);
    return wire::EncodeFrame(reply);
  }

 private:
  VerifierService::Session session_;
  std::function<void(wire::Message&)> mutate_;
};

class FailingChannel final : public Channel {
 protected:
  Bytes RoundTrip(const Bytes&) override { throw Error(ErrorCode::kTransport, "down"); }
};

class ClientTest : public ::testing::TestWithParam<RlEncoding> {
 protected:
  ClientTest() : rng_(81), ca_(testing::TestKeys(), rng_), verifier_(ca_.public_key()),
                 service_(verifier_) {
    ca_.EnrollClient("alice");
    ca_.EnrollClient("mallory");
    alice_.emplace(ca_.public_key(), ca_.IssuePseudonyms("alice", 20));
    mallory_.emplace(ca_.public_key(), ca_.IssuePseudonyms("mallory", 20));
  }

  RlConfig Config() const { return SmallConfig(GetParam()); }

  void InstallEmpty() { verifier_.Install(ca_.PublishRl(Config())); }
  void RevokeMallory() { verifier_.Install(ca_.RevokeClient("mallory", Config())); }

  DeterministicRandom rng_;
  CertificationAuthority ca_;
  Verifier verifier_;
  VerifierService service_;
  std::optional<Wallet> alice_, mallory_;
};

TEST_P(ClientTest, HonestClientIsAccepted) {
  InstallEmpty();
  LoopbackChannel channel(service_);
  Client client(*alice_, channel);
  const AuditOutcome out = client.Audit();
  ASSERT_EQ(out.status, AuditStatus::kClear) << out.detail;
  EXPECT_EQ(out.encoding, GetParam());
  ASSERT_TRUE(out.token.has_value());
  EXPECT_TRUE(VerifyToken(alice_->pseudonyms()[out.pseudonym_index].pseudonym, out.seed, *out.token));
  EXPECT_GT(out.transferred_bytes, 0u);
  EXPECT_EQ(client.Authenticate(out), Decision::kAccept);
  EXPECT_EQ(alice_->unused_count(), 19u);
  // The same outcome cannot be spent twice.
  EXPECT_THROW(client.Authenticate(out), Error);
}

TEST_P(ClientTest, RevokedClientSendsNothing) {
  RevokeMallory();
  LoopbackChannel channel(service_);
  Client client(*mallory_, channel);
  int requests = 0;
  client.set_request_observer([&](const AuthRequest&) { ++requests; });
  const AuditOutcome out = client.Audit();
  EXPECT_EQ(out.status, AuditStatus::kRevoked);
  EXPECT_FALSE(out.token.has_value());
  EXPECT_THROW(client.Authenticate(out), Error);
  EXPECT_EQ(requests, 0);
  EXPECT_TRUE(mallory_->IsUsed(mallory_->pseudonyms()[out.pseudonym_index].pseudonym.public_key));
  if (GetParam() == RlEncoding::kHbfa) {
    EXPECT_EQ(out.levels_fetched, 4u);
  }
}

TEST_P(ClientTest, NoRlIsTypedError) {
  LoopbackChannel channel(service_);
  Client client(*alice_, channel);
  const AuditOutcome out = client.Audit();
  EXPECT_EQ(out.status, AuditStatus::kInconclusive);
  ASSERT_TRUE(out.remote_error.has_value());
  EXPECT_EQ(*out.remote_error, wire::ErrorKind::kNoRlInstalled);
}

TEST_P(ClientTest, TransportFailureIsInconclusive) {
  InstallEmpty();
  FailingChannel channel;
  Client client(*alice_, channel);
  EXPECT_EQ(client.Audit().status, AuditStatus::kInconclusive);
  EXPECT_EQ(alice_->unused_count(), 20u);
}

TEST_P(ClientTest, ReplayAfterNewerRlIsStale) {
  InstallEmpty();
  LoopbackChannel first(service_);
  Client c1(*alice_, first);
  const AuditOutcome out = c1.Audit();
  ASSERT_EQ(out.status, AuditStatus::kClear);
  AuthRequest sent;
  c1.set_request_observer([&](const AuthRequest& r) { sent = r; });
  EXPECT_EQ(c1.Authenticate(out), Decision::kAccept);
  RevokeMallory();
  EXPECT_EQ(verifier_.CheckAuth(sent), Decision::kRejectStaleSeed);
}

TEST_P(ClientTest, WrongEncodingRequestIsInconclusive) {
  InstallEmpty();
  LoopbackChannel channel(service_);
  Client client(*alice_, channel);
  const AuditOutcome out =
      GetParam() == RlEncoding::kSingle ? client.AuditHbfa() : client.AuditSingle();
  EXPECT_EQ(out.status, AuditStatus::kInconclusive);
}

INSTANTIATE_TEST_SUITE_P(AllEncodings, ClientTest,
                         ::testing::Values(RlEncoding::kSingle, RlEncoding::kHbfa,
                                           RlEncoding::kRedactable),
                         [](const auto& info) { return std::string(RlEncodingName(info.param)); });

class ClientTamperTest : public ClientTest {};

TEST_F(ClientTamperTest, TamperedFilterIsInconclusive) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kSingle)));
  TamperingChannel channel(service_, [](wire::Message& m) {
    if (auto* f = std::get_if<wire::FilterMsg>(&m.body)) f->filter.back() ^= 0x01;
  });
  Client client(*alice_, channel);
  int requests = 0;
  client.set_request_observer([&](const AuthRequest&) { ++requests; });
  const AuditOutcome out = client.AuditSingle();
  EXPECT_EQ(out.status, AuditStatus::kInconclusive);
  EXPECT_EQ(requests, 0);
  EXPECT_EQ(alice_->unused_count(), 20u);
}

TEST_F(ClientTamperTest, ForgedDescriptorIsInconclusive) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kHbfa)));
  TamperingChannel channel(service_, [](wire::Message& m) {
    if (auto* s = std::get_if<wire::AuditStartMsg>(&m.body)) s->info.filters[0].k += 1;
  });
  Client client(*alice_, channel);
  EXPECT_EQ(client.AuditHbfa().status, AuditStatus::kInconclusive);
}

TEST_F(ClientTamperTest, ForgedRootSignatureRevealsNothing) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kRedactable)));
  bool bits_requested = false;
  TamperingChannel channel(service_, [&](wire::Message& m) {
    if (auto* s = std::get_if<wire::AuditStartMsg>(&m.body)) s->info.root.mutable_span()[0] ^= 1;
    if (std::holds_alternative<wire::BitsMsg>(m.body)) bits_requested = true;
  });
  Client client(*alice_, channel);
  EXPECT_EQ(client.AuditRedactable().status, AuditStatus::kInconclusive);
  EXPECT_FALSE(bits_requested);
  EXPECT_EQ(alice_->unused_count(), 20u);
}

TEST_F(ClientTamperTest, ForgedSegmentIsInconclusive) {
  verifier_.Install(ca_.RevokeClient("mallory", SmallConfig(RlEncoding::kRedactable)));
  // Claim zero bits everywhere, then hand over a doctored segment.
  TamperingChannel channel(service_, [](wire::Message& m) {
    if (auto* p = std::get_if<wire::SegmentProofMsg>(&m.body)) p->proof.segment[0] ^= 0x80;
  });
  Client client(*alice_, channel);
  const AuditOutcome out = client.AuditRedactable();
  EXPECT_EQ(out.status, AuditStatus::kInconclusive);
  // Bit positions were revealed, so the pseudonym is burned.
  EXPECT_EQ(alice_->unused_count(), 19u);
}

TEST_F(ClientTamperTest, LyingAboutBitsIsCaught) {
  verifier_.Install(ca_.RevokeClient("mallory", SmallConfig(RlEncoding::kRedactable)));
  TamperingChannel channel(service_, [](wire::Message& m) {
    if (auto* b = std::get_if<wire::BitsMsg>(&m.body)) b->bits.assign(b->bits.size(), false);
  });
  Client client(*mallory_, channel);
  int requests = 0;
  client.set_request_observer([&](const AuthRequest&) { ++requests; });
  const AuditOutcome out = client.AuditRedactable();
  // The verifier answers the proof request with a revoked notice, which
  // contradicts its own bit reply.
  EXPECT_EQ(out.status, AuditStatus::kInconclusive);
  EXPECT_EQ(requests, 0);
}

TEST_F(ClientTamperTest, RedactableTransferIsSmall) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kRedactable)));
  LoopbackChannel channel(service_);
  Client client(*alice_, channel);
  const AuditOutcome out = client.AuditRedactable();
  ASSERT_EQ(out.status, AuditStatus::kClear);
  EXPECT_LT(out.transferred_bytes, 4096u);
}

TEST_F(ClientTamperTest, HbfaEmptyListFetchesOnlySmallestLevel) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kHbfa)));
  LoopbackChannel channel(service_);
  Client client(*alice_, channel);
  const AuditOutcome out = client.AuditHbfa();
  ASSERT_EQ(out.status, AuditStatus::kClear);
  EXPECT_EQ(out.levels_fetched, 1u);
  EXPECT_EQ(out.filter_bytes, verifier_.snapshot()->Filter(0).canonical.size());
}

TEST(Wallet, ExhaustionAsksForReissue) {
  DeterministicRandom rng(82);
  CertificationAuthority ca(testing::TestKeys(), rng);
  ca.EnrollClient("a");
  Wallet wallet(ca.public_key(), ca.IssuePseudonyms("a", 2));
  Verifier verifier(ca.public_key());
  verifier.Install(ca.PublishRl(SmallConfig(RlEncoding::kSingle)));
  VerifierService service(verifier);
  for (int i = 0; i < 2; ++i) {
    LoopbackChannel channel(service);
    Client client(wallet, channel);
    EXPECT_EQ(client.Authenticate(client.Audit()), Decision::kAccept);
  }
  LoopbackChannel channel(service);
  Client client(wallet, channel);
  try {
    client.Audit();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResourceExhausted);
  }
  wallet.Add(ca.IssuePseudonyms("a", 1));
  EXPECT_EQ(client.Authenticate(client.Audit()), Decision::kAccept);
}

TEST(Wallet, SkipsOtherEpochs) {
  DeterministicRandom rng(83);
  CertificationAuthority ca(testing::TestKeys(), rng);
  ca.EnrollClient("a");
  Wallet wallet(ca.public_key(), ca.IssuePseudonyms("a", 1));
  ca.AdvanceEpoch();
  wallet.Add(ca.IssuePseudonyms("a", 1));
  EXPECT_EQ(wallet.NextUnused(1), 1u);
  EXPECT_EQ(wallet.NextUnused(0), 0u);
  EXPECT_THROW(wallet.NextUnused(2), Error);
}

TEST(WalletFile, SealOpenRoundTrip) {
  DeterministicRandom rng(84);
  CertificationAuthority ca(testing::TestKeys(), rng);
  ca.EnrollClient("a");
  Wallet wallet(ca.public_key(), ca.IssuePseudonyms("a", 3));
  wallet.Retire(wallet.pseudonyms()[1].pseudonym.public_key);
  const Bytes sealed = SealWallet(wallet, "correct horse", WalletKdf::Minimal(), rng);
  const Wallet back = OpenWallet(sealed, "correct horse");
  EXPECT_EQ(back.ca_public(), wallet.ca_public());
  ASSERT_EQ(back.pseudonyms().size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.pseudonyms()[i].pseudonym, wallet.pseudonyms()[i].pseudonym);
    EXPECT_EQ(back.pseudonyms()[i].secret_key.public_key(), wallet.pseudonyms()[i].pseudonym.public_key);
  }
  EXPECT_EQ(back.unused_count(), 2u);
  EXPECT_TRUE(back.IsUsed(wallet.pseudonyms()[1].pseudonym.public_key));

  // No secret seed appears in the clear.
  const ByteView secret = wallet.pseudonyms()[0].secret_key.seed();
  EXPECT_EQ(std::search(sealed.begin(), sealed.end(), secret.begin(), secret.end()), sealed.end());

  try {
    OpenWallet(sealed, "wrong");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPermissionDenied);
  }
  Bytes tampered = sealed;
  tampered.back() ^= 1;
  EXPECT_THROW(OpenWallet(tampered, "correct horse"), Error);
  EXPECT_THROW(OpenWallet(ByteView(sealed).first(20), "correct horse"), Error);
}

}  // namespace
}  // namespace lara
