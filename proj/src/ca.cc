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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lara {

void RlConfig::Validate() const {
  if (!(target_fp > 0.0 && target_fp < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_fp must be in (0, 1)");
  }
  if (k > kMaxHashFunctions) {
    throw Error(ErrorCode::kInvalidArgument, "k must be at most 64");
  }
  if (encoding == RlEncoding::kHbfa) {
    if (levels < 1 || levels > 32) {
      throw Error(ErrorCode::kInvalidArgument, "HBFA needs 1 to 32 levels");
    }
    if (reduction_factor < 2) {
      throw Error(ErrorCode::kInvalidArgument, "HBFA reduction factor must be >= 2");
    }
  }
  if (encoding == RlEncoding::kRedactable &&
      (segment_size_bits == 0 || segment_size_bits % 8 != 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment size must be a positive multiple of 8 bits");
  }
}

FilterParams AuthoritativeParams(const RlConfig& config, uint64_t token_count) {
  config.Validate();
  const uint64_t capacity = std::max<uint64_t>({token_count, config.min_capacity, 1});
  FilterParams params;
  if (config.fixed_n_bits != 0) {
    params.n_bits = config.fixed_n_bits;
    if (config.k != 0) {
      params.k = config.k;
    } else {
      const double k = std::round(static_cast<double>(params.n_bits) /
                                  static_cast<double>(capacity) * std::numbers::ln2);
      params.k = static_cast<uint32_t>(std::clamp(k, 1.0, double{kMaxHashFunctions}));
    }
  } else if (config.k != 0) {
    params = ParamsForFixedK(capacity, config.target_fp, config.k);
  } else {
    params = OptimalParams(capacity, config.target_fp);
  }
  params.n_bits = std::max(params.n_bits, kMinFilterBits);
  return params;
}

std::vector<FilterParams> HbfaLevelParams(const RlConfig& config,
                                          uint64_t token_count) {
  const FilterParams largest = AuthoritativeParams(config, token_count);
  std::vector<FilterParams> out(config.levels, largest);
  uint64_t n = largest.n_bits;
  for (size_t i = config.levels; i-- > 0;) {
    out[i].n_bits = n;
    n /= config.reduction_factor;
  }
  if (out.front().n_bits < kMinFilterBits) {
    throw Error(ErrorCode::kInvalidArgument,
                "HBFA smallest level would hold fewer than 8 bits");
  }
  return out;
}

namespace {

BloomFilter FilledFilter(const FilterParams& params, const FilterSalt& salt,
                         std::span<const EncodedToken> tokens) {
  BloomFilter filter(params, salt);
  for (const EncodedToken& t : tokens) filter.Insert(t.value.view());
  return filter;
}

Signature SignFilter(const SecretKey& key, const BloomFilter& filter,
                     const Seed& seed) {
  return Sign(key, FilterSigningDigest(filter, seed).view());
}

}  // namespace

RevocationList AssembleRl(std::span<const EncodedToken> tokens, const Seed& seed,
                          uint64_t version, uint64_t epoch, const RlConfig& config,
                          const SecretKey& ca_key, RandomSource& rng) {
  config.Validate();
  switch (config.encoding) {
    case RlEncoding::kSingle: {
      BloomFilter filter =
          FilledFilter(AuthoritativeParams(config, tokens.size()), SaltFromU64(0), tokens);
      Signature sig = SignFilter(ca_key, filter, seed);
      return RevocationList{version, epoch, seed, SingleBfBody{std::move(filter), sig}};
    }
    case RlEncoding::kHbfa: {
      HbfaBody body;
      const std::vector<FilterParams> levels = HbfaLevelParams(config, tokens.size());
      for (size_t i = 0; i < levels.size(); ++i) {
        body.filters.push_back(FilledFilter(levels[i], SaltFromU64(i + 1), tokens));
        body.signatures.push_back(SignFilter(ca_key, body.filters.back(), seed));
      }
      return RevocationList{version, epoch, seed, std::move(body)};
    }
    case RlEncoding::kRedactable: {
      BloomFilter filter =
          FilledFilter(AuthoritativeParams(config, tokens.size()), SaltFromU64(0), tokens);
      MerkleTree tree = MerkleTree::Build(filter.payload(), config.segment_size_bits, rng);
      const Digest d =
          RedactableSigningDigest(seed, tree.root(), filter.params(), filter.salt(),
                                  tree.segment_size_bits(), tree.leaf_count());
      Signature sig = Sign(ca_key, d.view());
      return RevocationList{version, epoch, seed,
                            RedactableBody{std::move(filter), std::move(tree), sig}};
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown encoding");
}

CertificationAuthority::CertificationAuthority(KeyPair keys, RandomSource& rng,
                                               uint64_t epoch)
    : keys_(std::move(keys)), rng_(rng), epoch_(epoch) {}

void CertificationAuthority::Emit(const JournalRecord& record) {
  if (journal_) journal_(record);
}

void CertificationAuthority::EnrollClient(const std::string& client_id) {
  if (client_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "client id must not be empty");
  }
  if (!clients_.try_emplace(client_id).second) {
    throw Error(ErrorCode::kAlreadyExists, "client '" + client_id + "' already enrolled");
  }
  Emit({.type = JournalRecord::Type::kEnroll, .client_id = client_id});
}

bool CertificationAuthority::IsEnrolled(const std::string& client_id) const {
  return clients_.contains(client_id);
}

bool CertificationAuthority::IsRevoked(const std::string& client_id) const {
  auto it = clients_.find(client_id);
  return it != clients_.end() && it->second.revoked;
}

CertificationAuthority::ClientRecord& CertificationAuthority::FindClient(
    const std::string& client_id) {
  auto it = clients_.find(client_id);
  if (it == clients_.end()) {
    throw Error(ErrorCode::kNotFound, "client '" + client_id + "' is not enrolled");
  }
  return it->second;
}

const std::vector<PseudonymSecret>& CertificationAuthority::pseudonyms_of(
    const std::string& client_id) const {
  auto it = clients_.find(client_id);
  if (it == clients_.end()) {
    throw Error(ErrorCode::kNotFound, "client '" + client_id + "' is not enrolled");
  }
  return it->second.pseudonyms;
}

std::vector<std::string> CertificationAuthority::client_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : clients_) ids.push_back(id);
  return ids;
}

std::vector<PseudonymSecret> CertificationAuthority::IssuePseudonyms(
    const std::string& client_id, uint32_t count) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  ClientRecord& client = FindClient(client_id);
  if (client.revoked) {
    throw Error(ErrorCode::kPermissionDenied, "client '" + client_id + "' is revoked");
  }
  std::vector<PseudonymSecret> issued;
  issued.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    KeyPair pair = GenerateKeyPair(rng_);
    Pseudonym p{pair.public_key, epoch_,
                Sign(keys_.secret, PseudonymDigest(pair.public_key, epoch_).view())};
    issued.push_back(PseudonymSecret{p, std::move(pair.secret)});
  }
  client.pseudonyms.insert(client.pseudonyms.end(), issued.begin(), issued.end());
  Emit({.type = JournalRecord::Type::kIssue,
        .client_id = client_id,
        .epoch = epoch_,
        .issued = issued});
  return issued;
}

void CertificationAuthority::MarkRevoked(ClientRecord& client) {
  if (!client.revoked) {
    client.revoked = true;
    revoked_.insert(revoked_.end(), client.pseudonyms.begin(), client.pseudonyms.end());
  }
}

RevocationList CertificationAuthority::RevokeClient(const std::string& client_id,
                                                    const RlConfig& config) {
  config.Validate();
  MarkRevoked(FindClient(client_id));
  Emit({.type = JournalRecord::Type::kRevoke, .client_id = client_id});
  return PublishRl(config);
}

EncodedToken CertificationAuthority::SignToken(const PseudonymSecret& p,
                                               const Seed& seed) {
  ++stats_.token_signatures;
  return EncodeToken(MakeToken(p, seed));
}

std::vector<EncodedToken> CertificationAuthority::EncodeAll(
    std::span<const PseudonymSecret> revoked, const Seed& seed) {
  std::vector<EncodedToken> out;
  out.reserve(revoked.size());
  for (const PseudonymSecret& p : revoked) out.push_back(SignToken(p, seed));
  return out;
}

RevocationList CertificationAuthority::Finish(std::span<const EncodedToken> tokens,
                                              const Seed& seed,
                                              const RlConfig& config) {
  if (published_seeds_.contains(seed)) {
    throw Error(ErrorCode::kFailedPrecondition, "seed already used by a published RL");
  }
  RevocationList rl =
      AssembleRl(tokens, seed, rl_version_ + 1, epoch_, config, keys_.secret, rng_);
  ++rl_version_;
  used_seeds_.insert(seed);
  published_seeds_.insert(seed);
  Emit({.type = JournalRecord::Type::kPublish, .version = rl_version_, .seed = seed});
  return rl;
}

RevocationList CertificationAuthority::Build(std::span<const PseudonymSecret> revoked,
                                             const Seed& seed,
                                             const RlConfig& config) {
  config.Validate();
  if (published_seeds_.contains(seed)) {
    throw Error(ErrorCode::kFailedPrecondition, "seed already used by a published RL");
  }
  const uint64_t before = stats_.token_signatures;
  std::vector<EncodedToken> tokens = EncodeAll(revoked, seed);
  stats_.last_publish_token_signatures = stats_.token_signatures - before;
  return Finish(tokens, seed, config);
}

RevocationList CertificationAuthority::BuildRlSingle(
    std::span<const PseudonymSecret> revoked, const Seed& seed, const RlConfig& config) {
  RlConfig c = config;
  c.encoding = RlEncoding::kSingle;
  return Build(revoked, seed, c);
}

RevocationList CertificationAuthority::BuildRlHbfa(
    std::span<const PseudonymSecret> revoked, const Seed& seed, const RlConfig& config) {
  RlConfig c = config;
  c.encoding = RlEncoding::kHbfa;
  return Build(revoked, seed, c);
}

RevocationList CertificationAuthority::BuildRlRedactable(
    std::span<const PseudonymSecret> revoked, const Seed& seed, const RlConfig& config) {
  RlConfig c = config;
  c.encoding = RlEncoding::kRedactable;
  return Build(revoked, seed, c);
}

RevocationList CertificationAuthority::PublishRl(const RlConfig& config) {
  config.Validate();
  const uint64_t before = stats_.token_signatures;
  Seed seed;
  std::vector<EncodedToken> tokens;
  if (precomputed_ && precomputed_->epoch == epoch_) {
    // Only pseudonyms revoked after the draft was prepared need signing.
    seed = precomputed_->seed;
    tokens = std::move(precomputed_->encoded_tokens);
    for (const PseudonymSecret& p : revoked_) {
      if (!precomputed_->covered.contains(p.pseudonym.public_key)) {
        tokens.push_back(SignToken(p, seed));
      }
    }
  } else {
    seed = FreshSeed();
    tokens = EncodeAll(revoked_, seed);
  }
  precomputed_.reset();
  stats_.last_publish_token_signatures = stats_.token_signatures - before;
  RevocationList rl = Finish(tokens, seed, config);
  if (auto_precompute_) PrecomputeNext();
  return rl;
}

void CertificationAuthority::PrecomputeNext() {
  PrecomputedRl draft;
  draft.seed = FreshSeed();
  draft.epoch = epoch_;
  draft.encoded_tokens = EncodeAll(revoked_, draft.seed);
  for (const PseudonymSecret& p : revoked_) draft.covered.insert(p.pseudonym.public_key);
  precomputed_ = std::move(draft);
}

Seed CertificationAuthority::FreshSeed() {
  for (;;) {
    Seed seed = RandomSeed(rng_);
    if (used_seeds_.insert(seed).second) return seed;
  }
}

void CertificationAuthority::AdvanceEpoch() {
  ++epoch_;
  for (auto& [_, client] : clients_) client.pseudonyms.clear();
  revoked_.clear();
  precomputed_.reset();
  Emit({.type = JournalRecord::Type::kAdvanceEpoch, .epoch = epoch_});
}

void CertificationAuthority::Apply(const JournalRecord& record) {
  switch (record.type) {
    case JournalRecord::Type::kEnroll:
      if (!clients_.try_emplace(record.client_id).second) {
        throw Error(ErrorCode::kMalformed, "journal enrolls a client twice");
      }
      break;
    case JournalRecord::Type::kIssue: {
      if (record.epoch != epoch_) {
        throw Error(ErrorCode::kMalformed, "journal issuance for a different epoch");
      }
      ClientRecord& client = FindClient(record.client_id);
      client.pseudonyms.insert(client.pseudonyms.end(), record.issued.begin(),
                               record.issued.end());
      break;
    }
    case JournalRecord::Type::kRevoke:
      MarkRevoked(FindClient(record.client_id));
      break;
    case JournalRecord::Type::kAdvanceEpoch:
      for (auto& [_, client] : clients_) client.pseudonyms.clear();
      revoked_.clear();
      precomputed_.reset();
      epoch_ = record.epoch;
      break;
    case JournalRecord::Type::kPublish:
      rl_version_ = std::max(rl_version_, record.version);
      used_seeds_.insert(record.seed);
      published_seeds_.insert(record.seed);
      break;
  }
}

}  // namespace lara
