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

#ifndef LARA_VERIFIER_H_
#define LARA_VERIFIER_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "lara/protocol.h"

namespace lara {

enum class Decision : uint8_t {
  kAccept = 0,
  kRejectRevoked = 1,
  kRejectStaleSeed = 2,
  kRejectBadPseudonym = 3,
  kRejectBadToken = 4,
};

const char* DecisionName(Decision d);

struct FilterDescriptor {
  uint64_t n_bits = 0;
  uint32_t k = 0;
  FilterSalt salt{};

  FilterParams params() const { return {n_bits, k}; }
  friend bool operator==(const FilterDescriptor&, const FilterDescriptor&) = default;
};

// What a client learns before fetching any filter material.
struct AuditStart {
  uint64_t version = 0;
  uint64_t epoch = 0;
  Seed seed;
  RlEncoding encoding = RlEncoding::kSingle;
  // One entry for single and redactable lists, one per level for HBFA.
  std::vector<FilterDescriptor> filters;
  // Redactable only.
  Digest root;
  uint32_t segment_size_bits = 0;
  uint64_t leaf_count = 0;
  Signature root_signature;

  friend bool operator==(const AuditStart&, const AuditStart&) = default;
};

struct ServedFilter {
  Bytes canonical;
  Signature signature;
};

// An installed, verified RL. Immutable; shared between sessions.
class RlSnapshot {
 public:
  explicit RlSnapshot(RevocationList rl);

  const RevocationList& rl() const { return rl_; }
  const AuditStart& audit_start() const { return start_; }
  size_t filter_count() const;

  // Throws kOutOfRange for a level the variant does not have.
  ServedFilter Filter(size_t level) const;
  // Redactable only. Throws kFailedPrecondition for other variants and
  // kOutOfRange for positions beyond the filter.
  std::vector<bool> Bits(std::span<const uint64_t> positions) const;
  // nullopt when the bit at `position` is set (revoked or wrong position).
  std::optional<SegmentProof> SegmentProofAt(uint64_t position) const;

  Decision CheckAuth(const PublicKey& ca_public, const AuthRequest& request) const;

 private:
  RevocationList rl_;
  AuditStart start_;
};

// Holds the current RL snapshot. Installs swap the snapshot atomically;
// readers keep whatever snapshot they already hold.
class Verifier {
 public:
  explicit Verifier(PublicKey ca_public);

  const PublicKey& ca_public() const { return ca_public_; }

  // Rejects bad signatures (kPermissionDenied) and version regressions
  // (kFailedPrecondition). Returns the installed version.
  uint64_t Install(RevocationList rl);
  uint64_t InstallBytes(ByteView rl_file);

  bool has_rl() const;
  // Throws kFailedPrecondition when nothing is installed.
  std::shared_ptr<const RlSnapshot> snapshot() const;
  uint64_t installed_version() const;

  Decision CheckAuth(const AuthRequest& request) const;

 private:
  PublicKey ca_public_;
  mutable std::mutex mu_;
  std::shared_ptr<const RlSnapshot> current_;
};

}  // namespace lara

#endif  // LARA_VERIFIER_H_
