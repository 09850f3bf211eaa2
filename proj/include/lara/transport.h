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

#ifndef LARA_TRANSPORT_H_
#define LARA_TRANSPORT_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "lara/verifier.h"
#include "lara/wire.h"

namespace lara {

// Protocol logic of a verifier endpoint, independent of the transport.
class VerifierService {
 public:
  explicit VerifierService(Verifier& verifier) : verifier_(verifier) {}

  Verifier& verifier() { return verifier_; }

  // Per-connection state. The RL snapshot is pinned by GetAuditStart so that
  // every later answer in the session refers to the same seed.
  class Session {
   public:
    explicit Session(VerifierService& service) : service_(service) {}

    wire::Message Handle(const wire::Message& request);
    // Decodes, handles and encodes one frame. Undecodable input yields an
    // Error frame and sets *close.
    Bytes HandleFrame(ByteView frame, bool* close);

   private:
    std::shared_ptr<const RlSnapshot> Current();

    VerifierService& service_;
    std::shared_ptr<const RlSnapshot> snapshot_;
  };

 private:
  Verifier& verifier_;
};

// Client side of one session.
class Channel {
 public:
  virtual ~Channel() = default;

  // Throws Error(kTransport) when the exchange fails.
  wire::Message Call(wire::Body request);

  uint64_t bytes_sent() const { return bytes_sent_; }
  uint64_t bytes_received() const { return bytes_received_; }

 protected:
  virtual Bytes RoundTrip(const Bytes& frame) = 0;

 private:
  uint32_t next_id_ = 1;
  uint64_t bytes_sent_ = 0;
  uint64_t bytes_received_ = 0;
};

// In-process transport. Frames still go through the codec.
class LoopbackChannel final : public Channel {
 public:
  explicit LoopbackChannel(VerifierService& service) : session_(service) {}

 protected:
  Bytes RoundTrip(const Bytes& frame) override;

 private:
  VerifierService::Session session_;
  bool closed_ = false;
};

class TcpChannel final : public Channel {
 public:
  static std::unique_ptr<TcpChannel> Connect(const std::string& host, uint16_t port);
  ~TcpChannel() override;

  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

 protected:
  Bytes RoundTrip(const Bytes& frame) override;

 private:
  explicit TcpChannel(int fd) : fd_(fd) {}
  int fd_;
};

// Thread-per-connection TCP endpoint.
class TcpServer {
 public:
  TcpServer(VerifierService& service, uint16_t port = 0,
            std::string bind_address = "127.0.0.1");
  ~TcpServer();

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  void Start();
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();
  uint16_t port() const { return port_; }

 private:
  void AcceptLoop();
  void Serve(int fd);

  VerifierService& service_;
  std::string bind_address_;
  uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::set<int> open_fds_;
  std::vector<std::thread> workers_;
};

// Blocking frame I/O on a socket. ReadFrame returns false on clean EOF
// before the first byte.
void WriteFrame(int fd, const Bytes& frame);
bool ReadFrame(int fd, Bytes* frame);

}  // namespace lara

#endif  // LARA_TRANSPORT_H_
