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

#include "lara/verifier.h"

namespace lara {

const char* DecisionName(Decision d) {
  switch (d) {
    case Decision::kAccept: return "Accept";
    case Decision::kRejectRevoked: return "RejectRevoked";
    case Decision::kRejectStaleSeed: return "RejectStaleSeed";
    case Decision::kRejectBadPseudonym: return "RejectBadPseudonym";
    case Decision::kRejectBadToken: return "RejectBadToken";
  }
  return "Unknown";
}

namespace {

FilterDescriptor Describe(const BloomFilter& f) {
  return FilterDescriptor{f.n_bits(), f.k(), f.salt()};
}

}  // namespace

RlSnapshot::RlSnapshot(RevocationList rl) : rl_(std::move(rl)) {
  start_.version = rl_.version;
  start_.epoch = rl_.epoch;
  start_.seed = rl_.seed;
  start_.encoding = rl_.encoding();
  if (const auto* single = std::get_if<SingleBfBody>(&rl_.body)) {
    start_.filters.push_back(Describe(single->filter));
  } else if (const auto* hbfa = std::get_if<HbfaBody>(&rl_.body)) {
    for (const BloomFilter& f : hbfa->filters) start_.filters.push_back(Describe(f));
  } else {
    const auto& rs = std::get<RedactableBody>(rl_.body);
    start_.filters.push_back(Describe(rs.filter));
    start_.root = rs.tree.root();
    start_.segment_size_bits = rs.tree.segment_size_bits();
    start_.leaf_count = rs.tree.leaf_count();
    start_.root_signature = rs.signature;
  }
}

size_t RlSnapshot::filter_count() const {
  if (const auto* hbfa = std::get_if<HbfaBody>(&rl_.body)) return hbfa->filters.size();
  return 1;
}

ServedFilter RlSnapshot::Filter(size_t level) const {
  if (const auto* single = std::get_if<SingleBfBody>(&rl_.body)) {
    if (level == 0) return {single->filter.Serialize(), single->signature};
  } else if (const auto* hbfa = std::get_if<HbfaBody>(&rl_.body)) {
    if (level < hbfa->filters.size()) {
      return {hbfa->filters[level].Serialize(), hbfa->signatures[level]};
    }
  } else {
    throw Error(ErrorCode::kFailedPrecondition,
                "redactable lists are audited through bits and proofs");
  }
  throw Error(ErrorCode::kOutOfRange, "no filter at level " + std::to_string(level));
}

std::vector<bool> RlSnapshot::Bits(std::span<const uint64_t> positions) const {
  const auto* rs = std::get_if<RedactableBody>(&rl_.body);
  if (rs == nullptr) {
    throw Error(ErrorCode::kFailedPrecondition, "bit queries need a redactable list");
  }
  std::vector<bool> out;
  out.reserve(positions.size());
  for (uint64_t pos : positions) out.push_back(rs->filter.TestBit(pos));
  return out;
}

std::optional<SegmentProof> RlSnapshot::SegmentProofAt(uint64_t position) const {
  const auto* rs = std::get_if<RedactableBody>(&rl_.body);
  if (rs == nullptr) {
    throw Error(ErrorCode::kFailedPrecondition, "segment proofs need a redactable list");
  }
  if (rs->filter.TestBit(position)) return std::nullopt;
  return rs->tree.Prove(position / rs->tree.segment_size_bits(), rs->filter.payload());
}

Decision RlSnapshot::CheckAuth(const PublicKey& ca_public,
                               const AuthRequest& request) const {
  if (!ValidatePseudonym(ca_public, request.pseudonym, rl_.epoch)) {
    return Decision::kRejectBadPseudonym;
  }
  if (request.seed_echo != rl_.seed) return Decision::kRejectStaleSeed;
  if (!VerifyToken(request.pseudonym, rl_.seed, request.token)) {
    return Decision::kRejectBadToken;
  }
  if (RlMembership(rl_, EncodeToken(request.token))) return Decision::kRejectRevoked;
  return Decision::kAccept;
}

Verifier::Verifier(PublicKey ca_public) : ca_public_(ca_public) {}

uint64_t Verifier::Install(RevocationList rl) {
  if (!rl.VerifySignatures(ca_public_)) {
    throw Error(ErrorCode::kPermissionDenied, "revocation list signature check failed");
  }
  auto next = std::make_shared<const RlSnapshot>(std::move(rl));
  std::lock_guard<std::mutex> lock(mu_);
  if (current_ && next->rl().version < current_->rl().version) {
    throw Error(ErrorCode::kFailedPrecondition,
                "revocation list version " + std::to_string(next->rl().version) +
                    " is older than installed " +
                    std::to_string(current_->rl().version));
  }
  current_ = std::move(next);
  return current_->rl().version;
}

uint64_t Verifier::InstallBytes(ByteView rl_file) {
  return Install(RevocationList::Deserialize(rl_file));
}

bool Verifier::has_rl() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_ != nullptr;
}

std::shared_ptr<const RlSnapshot> Verifier::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!current_) {
    throw Error(ErrorCode::kFailedPrecondition, "no revocation list installed");
  }
  return current_;
}

uint64_t Verifier::installed_version() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_ ? current_->rl().version : 0;
}

Decision Verifier::CheckAuth(const AuthRequest& request) const {
  return snapshot()->CheckAuth(ca_public_, request);
}

}  // namespace lara
