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

#ifndef LARA_CLIENT_H_
#define LARA_CLIENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "lara/protocol.h"
#include "lara/transport.h"
#include "lara/verifier.h"
#include "lara/wire.h"

namespace lara {

// The client's pseudonyms. A pseudonym is used at most once: after it is
// sent in an AuthRequest, or burned by an audit that found it listed.
class Wallet {
 public:
  explicit Wallet(PublicKey ca_public, std::vector<PseudonymSecret> pseudonyms = {});

  const PublicKey& ca_public() const { return ca_public_; }
  const std::vector<PseudonymSecret>& pseudonyms() const { return pseudonyms_; }
  void Add(const std::vector<PseudonymSecret>& more);

  size_t unused_count() const;
  bool IsUsed(const PublicKey& key) const { return used_.contains(key); }
  // Index of the first unused pseudonym for `epoch`. Throws
  // kResourceExhausted when the client must ask the CA for more.
  size_t NextUnused(uint64_t epoch) const;
  void Retire(const PublicKey& key) { used_.insert(key); }

 private:
  PublicKey ca_public_;
  std::vector<PseudonymSecret> pseudonyms_;
  std::unordered_set<PublicKey, FixedBytesHash> used_;
};

enum class AuditStatus { kClear, kRevoked, kInconclusive };

const char* AuditStatusName(AuditStatus s);

struct AuditOutcome {
  AuditStatus status = AuditStatus::kInconclusive;
  // Set when Clear: the token bound to `seed` for pseudonym `pseudonym_index`.
  std::optional<AccessToken> token;
  size_t pseudonym_index = 0;
  Seed seed;
  RlEncoding encoding = RlEncoding::kSingle;
  uint64_t rl_version = 0;
  // Reply bytes received during the audit, frame headers included.
  uint64_t transferred_bytes = 0;
  // Canonical filter bytes downloaded (single and HBFA).
  uint64_t filter_bytes = 0;
  uint32_t levels_fetched = 0;
  // Typed error reported by the verifier, if that ended the audit.
  std::optional<wire::ErrorKind> remote_error;
  std::string detail;
};

class Client {
 public:
  Client(Wallet& wallet, Channel& channel) : wallet_(wallet), channel_(channel) {}

  // Fetches the audit start and runs the flow for the advertised encoding.
  AuditOutcome Audit();
  AuditOutcome AuditSingle();
  AuditOutcome AuditHbfa();
  AuditOutcome AuditRedactable();

  // Sends the AuthRequest for a Clear outcome and marks its pseudonym used.
  // Throws kFailedPrecondition for any other outcome.
  Decision Authenticate(const AuditOutcome& outcome);

  // Sees every AuthRequest before it is sent.
  void set_request_observer(std::function<void(const AuthRequest&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  struct Started;
  AuditOutcome Run(std::optional<RlEncoding> expected);
  void RunSingle(const AuditStart& start, const EncodedToken& encoded, AuditOutcome& out);
  void RunHbfa(const AuditStart& start, const EncodedToken& encoded, AuditOutcome& out);
  void RunRedactable(const AuditStart& start, const EncodedToken& encoded,
                     AuditOutcome& out);
  bool FetchFilter(const AuditStart& start, size_t level, BloomFilter* filter,
                   AuditOutcome& out);

  Wallet& wallet_;
  Channel& channel_;
  std::function<void(const AuthRequest&)> observer_;
};

}  // namespace lara

#endif  // LARA_CLIENT_H_
