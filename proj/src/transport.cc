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
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

namespace lara {
namespace {

wire::Message ErrorReply(uint32_t id, wire::ErrorKind kind, const std::string& text) {
  return wire::Message{id, wire::ErrorMsg{kind, text}};
}

wire::ErrorKind KindFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kOutOfRange: return wire::ErrorKind::kOutOfRange;
    case ErrorCode::kFailedPrecondition: return wire::ErrorKind::kWrongVariant;
    default: return wire::ErrorKind::kInternal;
  }
}

}  // namespace

std::shared_ptr<const RlSnapshot> VerifierService::Session::Current() {
  if (snapshot_) return snapshot_;
  return service_.verifier().snapshot();
}

wire::Message VerifierService::Session::Handle(const wire::Message& request) {
  const uint32_t id = request.correlation_id;
  if (std::holds_alternative<wire::InstallRl>(request.body)) {
    try {
      const uint64_t v =
          service_.verifier().InstallBytes(std::get<wire::InstallRl>(request.body).rl_file);
      return {id, wire::InstallAck{v}};
    } catch (const Error& e) {
      return ErrorReply(id, wire::ErrorKind::kInstallRejected, e.what());
    }
  }
  std::shared_ptr<const RlSnapshot> snap;
  try {
    snap = std::holds_alternative<wire::GetAuditStart>(request.body)
               ? service_.verifier().snapshot()
               : Current();
  } catch (const Error& e) {
    return ErrorReply(id, wire::ErrorKind::kNoRlInstalled, e.what());
  }
  try {
    if (std::holds_alternative<wire::GetAuditStart>(request.body)) {
      snapshot_ = snap;
      return {id, wire::AuditStartMsg{snap->audit_start()}};
    }
    if (const auto* m = std::get_if<wire::GetFilter>(&request.body)) {
      ServedFilter f = snap->Filter(m->level);
      return {id, wire::FilterMsg{std::move(f.canonical), f.signature}};
    }
    if (const auto* m = std::get_if<wire::GetBits>(&request.body)) {
      return {id, wire::BitsMsg{snap->Bits(m->positions)}};
    }
    if (const auto* m = std::get_if<wire::GetSegmentProof>(&request.body)) {
      std::optional<SegmentProof> proof = snap->SegmentProofAt(m->position);
      if (!proof) return {id, wire::RevokedNotice{}};
      return {id, wire::SegmentProofMsg{std::move(*proof)}};
    }
    if (const auto* m = std::get_if<wire::Authenticate>(&request.body)) {
      return {id, wire::DecisionMsg{snap->CheckAuth(service_.verifier().ca_public(),
                                                    m->request)}};
    }
  } catch (const Error& e) {
    return ErrorReply(id, KindFor(e), e.what());
  }
  return ErrorReply(id, wire::ErrorKind::kUnknownType, "not a request message");
}

Bytes VerifierService::Session::HandleFrame(ByteView frame, bool* close) {
  *close = false;
  wire::Message request;
  try {
    request = wire::DecodeFrame(frame);
  } catch (const wire::ProtocolError& e) {
    *close = true;
    return wire::EncodeFrame(ErrorReply(0, e.kind(), e.what()));
  }
  wire::Message reply = Handle(request);
  if (std::holds_alternative<wire::ErrorMsg>(reply.body) &&
      std::get<wire::ErrorMsg>(reply.body).kind == wire::ErrorKind::kUnknownType) {
    *close = true;
  }
  return wire::EncodeFrame(reply);
}

wire::Message Channel::Call(wire::Body request) {
  wire::Message msg{next_id_++, std::move(request)};
  Bytes frame = wire::EncodeFrame(msg);
  bytes_sent_ += frame.size();
  Bytes reply_frame = RoundTrip(frame);
  bytes_received_ += reply_frame.size();
  wire::Message reply;
  try {
    reply = wire::DecodeFrame(reply_frame);
  } catch (const wire::ProtocolError& e) {
    throw Error(ErrorCode::kTransport, std::string("bad reply: ") + e.what());
  }
  if (reply.correlation_id != msg.correlation_id && reply.correlation_id != 0) {
    throw Error(ErrorCode::kTransport, "reply correlation id mismatch");
  }
  return reply;
}

Bytes LoopbackChannel::RoundTrip(const Bytes& frame) {
  if (closed_) throw Error(ErrorCode::kTransport, "loopback session closed");
  bool close = false;
  Bytes reply = session_.HandleFrame(frame, &close);
  closed_ = close;
  return reply;
}

void WriteFrame(int fd, const Bytes& frame) {
  size_t sent = 0;
  while (sent < frame.size()) {
    ssize_t n = ::send(fd, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::kTransport, std::string("send: ") + std::strerror(errno));
    sent += static_cast<size_t>(n);
  }
}

namespace {

// Returns bytes read; fewer than `len` only on EOF.
size_t ReadFull(int fd, uint8_t* out, size_t len) {
  size_t got = 0;
  while (got < len) {
    ssize_t n = ::recv(fd, out + got, len - got, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw Error(ErrorCode::kTransport, std::string("recv: ") + std::strerror(errno));
    if (n == 0) break;
    got += static_cast<size_t>(n);
  }
  return got;
}

}  // namespace

bool ReadFrame(int fd, Bytes* frame) {
  uint8_t header[wire::kFrameHeaderSize];
  const size_t got = ReadFull(fd, header, sizeof(header));
  if (got == 0) return false;
  if (got < sizeof(header)) throw Error(ErrorCode::kTransport, "truncated frame header");
  // Validates size and type before allocating the payload.
  const wire::FrameHeader h = wire::DecodeHeader(header);
  frame->assign(header, header + sizeof(header));
  frame->resize(sizeof(header) + h.payload_length);
  if (ReadFull(fd, frame->data() + sizeof(header), h.payload_length) != h.payload_length) {
    throw Error(ErrorCode::kTransport, "connection closed mid-frame");
  }
  return true;
}

std::unique_ptr<TcpChannel> TcpChannel::Connect(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw Error(ErrorCode::kTransport, std::string("resolve: ") + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw Error(ErrorCode::kTransport, "cannot connect to " + host + ":" + service);
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::unique_ptr<TcpChannel>(new TcpChannel(fd));
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

Bytes TcpChannel::RoundTrip(const Bytes& frame) {
  WriteFrame(fd_, frame);
  Bytes reply;
  try {
    if (!ReadFrame(fd_, &reply)) {
      throw Error(ErrorCode::kTransport, "connection closed by verifier");
    }
  } catch (const wire::ProtocolError& e) {
    throw Error(ErrorCode::kTransport, std::string("bad reply header: ") + e.what());
  }
  return reply;
}

TcpServer::TcpServer(VerifierService& service, uint16_t port, std::string bind_address)
    : service_(service), bind_address_(std::move(bind_address)), port_(port) {}

TcpServer::~TcpServer() { Stop(); }

void TcpServer::Start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::kTransport, "socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, bind_address_.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad bind address " + bind_address_);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(ErrorCode::kTransport, "cannot listen: " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { AcceptLoop(); });
}

void TcpServer::AcceptLoop() {
  while (!stopping_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    open_fds_.insert(fd);
    workers_.emplace_back([this, fd] { Serve(fd); });
  }
}

void TcpServer::Serve(int fd) {
  VerifierService::Session session(service_);
  try {
    Bytes frame;
    for (;;) {
      bool ok;
      try {
        ok = ReadFrame(fd, &frame);
      } catch (const wire::ProtocolError& e) {
        WriteFrame(fd, wire::EncodeFrame(
                           wire::Message{0, wire::ErrorMsg{e.kind(), e.what()}}));
        break;
      }
      if (!ok) break;
      bool close = false;
      WriteFrame(fd, session.HandleFrame(frame, &close));
      if (close) break;
    }
  } catch (const Error&) {
    // Transport failure ends this session only.
  }
  // Closing with unread input makes the kernel answer with RST, which can
  // overtake the final reply. Half-close and drain briefly first.
  ::shutdown(fd, SHUT_WR);
  timeval tv{0, 200000};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  uint8_t sink[4096];
  for (size_t drained = 0; drained < (1u << 20);) {
    const ssize_t n = ::recv(fd, sink, sizeof sink, 0);
    if (n <= 0) break;
    drained += static_cast<size_t>(n);
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (open_fds_.erase(fd) > 0) ::close(fd);
}

void TcpServer::Stop() {
  if (stopping_.exchange(true)) return;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (std::thread& t : workers) t.join();
}

void TcpServer::Wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace lara
