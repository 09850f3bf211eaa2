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

#include "lara/transport.h"

#include <arpa/inet.h>
#include <gtest/gtest.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <thread>

#include "lara/ca.h"
#include "lara/client.h"
#include "test_util.h"

namespace lara {
namespace {

using testing::SmallConfig;

int RawConnect(uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  return fd;
}

class TcpTest : public ::testing::Test {
 protected:
  TcpTest() : rng_(91), ca_(testing::TestKeys(), rng_), verifier_(ca_.public_key()),
              service_(verifier_), server_(service_) {
    for (const char* id : {"a", "b", "revoked"}) {
      ca_.EnrollClient(id);
    }
    a_.emplace(ca_.public_key(), ca_.IssuePseudonyms("a", 10));
    b_.emplace(ca_.public_key(), ca_.IssuePseudonyms("b", 10));
    r_.emplace(ca_.public_key(), ca_.IssuePseudonyms("revoked", 10));
    server_.Start();
  }
  ~TcpTest() override { server_.Stop(); }

  DeterministicRandom rng_;
  CertificationAuthority ca_;
  Verifier verifier_;
  VerifierService service_;
  TcpServer server_;
  std::optional<Wallet> a_, b_, r_;
};

TEST_F(TcpTest, FullExchangeEveryEncoding) {
  for (RlEncoding e : {RlEncoding::kSingle, RlEncoding::kHbfa, RlEncoding::kRedactable}) {
    auto install = TcpChannel::Connect("127.0.0.1", server_.port());
    const RevocationList rl = ca_.PublishRl(SmallConfig(e));
    const wire::Message reply = install->Call(wire::InstallRl{rl.Serialize()});
    ASSERT_TRUE(std::holds_alternative<wire::InstallAck>(reply.body));
    EXPECT_EQ(std::get<wire::InstallAck>(reply.body).version, rl.version);

    auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
    Client client(*a_, *channel);
    const AuditOutcome out = client.Audit();
    ASSERT_EQ(out.status, AuditStatus::kClear) << out.detail;
    EXPECT_EQ(out.encoding, e);
    EXPECT_EQ(client.Authenticate(out), Decision::kAccept);
  }
}

TEST_F(TcpTest, InstallRejectionIsReported) {
  auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
  const wire::Message reply = channel->Call(wire::InstallRl{Bytes{1, 2, 3}});
  ASSERT_TRUE(std::holds_alternative<wire::ErrorMsg>(reply.body));
  EXPECT_EQ(std::get<wire::ErrorMsg>(reply.body).kind, wire::ErrorKind::kInstallRejected);
}

TEST_F(TcpTest, ConcurrentClientsGetIndependentDecisions) {
  verifier_.Install(ca_.RevokeClient("revoked", SmallConfig(RlEncoding::kSingle)));
  AuditStatus sa{}, sb{}, sr{};
  Decision da{}, db{};
  auto run = [&](Wallet& w, AuditStatus* s, Decision* d) {
    auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
    Client client(w, *channel);
    for (int i = 0; i < 5; ++i) {
      const AuditOutcome out = client.Audit();
      *s = out.status;
      if (out.status != AuditStatus::kClear) return;
      *d = client.Authenticate(out);
    }
  };
  std::thread ta(run, std::ref(*a_), &sa, &da);
  std::thread tb(run, std::ref(*b_), &sb, &db);
  std::thread tr(run, std::ref(*r_), &sr, nullptr);
  ta.join();
  tb.join();
  tr.join();
  EXPECT_EQ(sa, AuditStatus::kClear);
  EXPECT_EQ(sb, AuditStatus::kClear);
  EXPECT_EQ(da, Decision::kAccept);
  EXPECT_EQ(db, Decision::kAccept);
  EXPECT_EQ(sr, AuditStatus::kRevoked);
  EXPECT_EQ(a_->unused_count(), 5u);
}

TEST_F(TcpTest, MalformedFrameClosesSessionButServerSurvives) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kSingle)));
  const int fd = RawConnect(server_.port());
  ASSERT_GE(fd, 0);
  // Unknown message type 0x42.
  WriteFrame(fd, Bytes{0, 0, 0, 4, 0x42, 0, 0, 0, 1});
  Bytes reply;
  ASSERT_TRUE(ReadFrame(fd, &reply));
  const wire::Message m = wire::DecodeFrame(reply);
  ASSERT_TRUE(std::holds_alternative<wire::ErrorMsg>(m.body));
  EXPECT_EQ(std::get<wire::ErrorMsg>(m.body).kind, wire::ErrorKind::kUnknownType);
  Bytes more;
  EXPECT_FALSE(ReadFrame(fd, &more));  // closed by the server
  ::close(fd);

  const int fd2 = RawConnect(server_.port());
  ASSERT_GE(fd2, 0);
  // Oversized length header.
  const Bytes huge = {0x7f, 0xff, 0xff, 0xff, 0x01};
  ASSERT_EQ(::send(fd2, huge.data(), huge.size(), MSG_NOSIGNAL), ssize_t(huge.size()));
  ASSERT_TRUE(ReadFrame(fd2, &reply));
  EXPECT_EQ(std::get<wire::ErrorMsg>(wire::DecodeFrame(reply).body).kind,
            wire::ErrorKind::kMalformedFrame);
  ::close(fd2);

  auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
  Client client(*a_, *channel);
  EXPECT_EQ(client.Authenticate(client.Audit()), Decision::kAccept);
}

TEST_F(TcpTest, SessionPinsSnapshot) {
  const RevocationList first = ca_.PublishRl(SmallConfig(RlEncoding::kHbfa));
  verifier_.Install(first);
  auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
  const wire::Message start = channel->Call(wire::GetAuditStart{});
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kHbfa)));
  const wire::Message f = channel->Call(wire::GetFilter{0});
  const auto& filter = std::get<wire::FilterMsg>(f.body);
  EXPECT_EQ(std::get<wire::AuditStartMsg>(start.body).info.seed, first.seed);
  EXPECT_TRUE(Verify(ca_.public_key(), FilterSigningDigest(filter.filter, first.seed).view(),
                     filter.signature));
}

TEST_F(TcpTest, ServerErrorsAreTyped) {
  verifier_.Install(ca_.PublishRl(SmallConfig(RlEncoding::kSingle)));
  auto channel = TcpChannel::Connect("127.0.0.1", server_.port());
  channel->Call(wire::GetAuditStart{});
  auto kind = [&](wire::Body b) {
    const wire::Message m = channel->Call(std::move(b));
    return std::get<wire::ErrorMsg>(m.body).kind;
  };
  EXPECT_EQ(kind(wire::GetFilter{1}), wire::ErrorKind::kOutOfRange);
  EXPECT_EQ(kind(wire::GetBits{{1}}), wire::ErrorKind::kWrongVariant);
}

TEST(Tcp, ConnectFailureIsTransportError) {
  try {
    TcpChannel::Connect("127.0.0.1", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
}

}  // namespace
}  // namespace lara
