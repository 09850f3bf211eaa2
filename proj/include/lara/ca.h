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

#ifndef LARA_CA_H_
#define LARA_CA_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lara/protocol.h"

namespace lara {

// How a revocation list is encoded and sized.
struct RlConfig {
  RlEncoding encoding = RlEncoding::kSingle;
  // False-positive target of the authoritative filter.
  double target_fp = 1e-4;
  // Filters are sized for max(tokens, min_capacity) elements.
  uint64_t min_capacity = 1024;
  // 0 picks the optimal hash count for the authoritative filter.
  uint32_t k = 0;
  // HBFA only.
  uint32_t levels = 4;
  uint32_t reduction_factor = 2;
  // Redactable only; must be a multiple of 8.
  uint32_t segment_size_bits = 512;
  // Nonzero pins the authoritative filter to exactly this many bits.
  uint64_t fixed_n_bits = 0;

  void Validate() const;
};

FilterParams AuthoritativeParams(const RlConfig& config, uint64_t token_count);
// Level sizes, smallest first. Level i of L has n_bits / r^(L-1-i) bits.
std::vector<FilterParams> HbfaLevelParams(const RlConfig& config,
                                          uint64_t token_count);

// Builds and signs an RL over already-encoded tokens. Holds no CA state, so
// it can also rebuild an RL from scratch for comparison.
RevocationList AssembleRl(std::span<const EncodedToken> tokens, const Seed& seed,
                          uint64_t version, uint64_t epoch, const RlConfig& config,
                          const SecretKey& ca_key, RandomSource& rng);

struct PrecomputedRl {
  Seed seed;
  uint64_t epoch = 0;
  std::vector<EncodedToken> encoded_tokens;
  // Pseudonyms whose tokens are already in encoded_tokens.
  std::unordered_set<PublicKey, FixedBytesHash> covered;
};

struct CaStats {
  // Access tokens the CA has signed on behalf of revoked pseudonyms.
  uint64_t token_signatures = 0;
  // Token signatures spent inside the most recent publish.
  uint64_t last_publish_token_signatures = 0;
};

struct JournalRecord {
  enum class Type : uint8_t {
    kEnroll = 1,
    kIssue = 2,
    kRevoke = 3,
    kAdvanceEpoch = 4,
    kPublish = 5,
  };

  Type type = Type::kEnroll;
  std::string client_id;
  uint64_t epoch = 0;
  std::vector<PseudonymSecret> issued;
  uint64_t version = 0;
  Seed seed;
};

class CertificationAuthority {
 public:
  CertificationAuthority(KeyPair keys, RandomSource& rng, uint64_t epoch = 0);

  const PublicKey& public_key() const { return keys_.public_key; }
  uint64_t current_epoch() const { return epoch_; }
  uint64_t rl_version() const { return rl_version_; }
  const CaStats& stats() const { return stats_; }

  // Refresh the precomputed draft after every publish.
  void set_auto_precompute(bool on) { auto_precompute_ = on; }
  void set_journal(std::function<void(const JournalRecord&)> sink) {
    journal_ = std::move(sink);
  }

  // Throws kAlreadyExists for a known id.
  void EnrollClient(const std::string& client_id);
  bool IsEnrolled(const std::string& client_id) const;
  bool IsRevoked(const std::string& client_id) const;

  // Throws kNotFound for unknown ids and kPermissionDenied for revoked ones.
  std::vector<PseudonymSecret> IssuePseudonyms(const std::string& client_id,
                                               uint32_t count);

  // Adds every current-epoch pseudonym of the client to the revoked set and
  // publishes a new RL covering the whole set under a fresh seed.
  RevocationList RevokeClient(const std::string& client_id, const RlConfig& config);

  // Publishes an RL for the current revoked set, consuming the precomputed
  // draft when one exists for this epoch.
  RevocationList PublishRl(const RlConfig& config);

  // Builders for an explicit revoked set and seed. Throw kFailedPrecondition
  // if the seed already backs a published RL.
  RevocationList BuildRlSingle(std::span<const PseudonymSecret> revoked,
                               const Seed& seed, const RlConfig& config);
  RevocationList BuildRlHbfa(std::span<const PseudonymSecret> revoked,
                             const Seed& seed, const RlConfig& config);
  RevocationList BuildRlRedactable(std::span<const PseudonymSecret> revoked,
                                   const Seed& seed, const RlConfig& config);

  void PrecomputeNext();
  const std::optional<PrecomputedRl>& precomputed() const { return precomputed_; }

  void AdvanceEpoch();

  const std::vector<PseudonymSecret>& revoked_pseudonyms() const { return revoked_; }
  const std::vector<PseudonymSecret>& pseudonyms_of(const std::string& client_id) const;
  std::vector<std::string> client_ids() const;

  // Draws a seed never handed out before.
  Seed FreshSeed();

  // Replays a journal record without emitting a new one.
  void Apply(const JournalRecord& record);

 private:
  struct ClientRecord {
    bool revoked = false;
    std::vector<PseudonymSecret> pseudonyms;
  };

  ClientRecord& FindClient(const std::string& client_id);
  EncodedToken SignToken(const PseudonymSecret& p, const Seed& seed);
  std::vector<EncodedToken> EncodeAll(std::span<const PseudonymSecret> revoked,
                                      const Seed& seed);
  RevocationList Build(std::span<const PseudonymSecret> revoked, const Seed& seed,
                       const RlConfig& config);
  RevocationList Finish(std::span<const EncodedToken> tokens, const Seed& seed,
                        const RlConfig& config);
  void MarkRevoked(ClientRecord& client);
  void Emit(const JournalRecord& record);

  KeyPair keys_;
  RandomSource& rng_;
  uint64_t epoch_;
  uint64_t rl_version_ = 0;
  bool auto_precompute_ = false;
  std::map<std::string, ClientRecord> clients_;
  std::vector<PseudonymSecret> revoked_;
  std::set<Seed> used_seeds_;
  std::set<Seed> published_seeds_;
  std::optional<PrecomputedRl> precomputed_;
  CaStats stats_;
  std::function<void(const JournalRecord&)> journal_;
};

}  // namespace lara

#endif  // LARA_CA_H_
