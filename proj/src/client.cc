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

namespace lara {

Wallet::Wallet(PublicKey ca_public, std::vector<PseudonymSecret> pseudonyms)
    : ca_public_(ca_public), pseudonyms_(std::move(pseudonyms)) {}

void Wallet::Add(const std::vector<PseudonymSecret>& more) {
  pseudonyms_.insert(pseudonyms_.end(), more.begin(), more.end());
}

size_t Wallet::unused_count() const {
  size_t n = 0;
  for (const PseudonymSecret& p : pseudonyms_) {
    if (!used_.contains(p.pseudonym.public_key)) ++n;
  }
  return n;
}

size_t Wallet::NextUnused(uint64_t epoch) const {
  for (size_t i = 0; i < pseudonyms_.size(); ++i) {
    const Pseudonym& p = pseudonyms_[i].pseudonym;
    if (p.epoch == epoch && !used_.contains(p.public_key)) return i;
  }
  throw Error(ErrorCode::kResourceExhausted,
              "no unused pseudonym for epoch " + std::to_string(epoch) +
                  "; request more from the CA");
}

const char* AuditStatusName(AuditStatus s) {
  switch (s) {
    case AuditStatus::kClear: return "Clear";
    case AuditStatus::kRevoked: return "Revoked";
    case AuditStatus::kInconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

// Typed Error frame -> remembered on the outcome; any other unexpected
// reply is just inconclusive.
template <typename T>
const T* Expect(const wire::Message& reply, AuditOutcome& out, const char* what) {
  if (const auto* m = std::get_if<T>(&reply.body)) return m;
  if (const auto* e = std::get_if<wire::ErrorMsg>(&reply.body)) {
    out.remote_error = e->kind;
    out.detail = std::string(what) + ": verifier error " +
                 wire::ErrorKindName(e->kind) + " (" + e->message + ")";
  } else {
    out.detail = std::string(what) + ": unexpected reply";
  }
  return nullptr;
}

bool GeometryConsistent(const AuditStart& s) {
  if (s.filters.empty()) return false;
  for (size_t i = 0; i < s.filters.size(); ++i) {
    const FilterDescriptor& f = s.filters[i];
    if (f.n_bits < kMinFilterBits || f.k == 0 || f.k > kMaxHashFunctions) return false;
    if (i > 0 && f.n_bits <= s.filters[i - 1].n_bits) return false;
  }
  return true;
}

}  // namespace

AuditOutcome Client::Audit() { return Run(std::nullopt); }
AuditOutcome Client::AuditSingle() { return Run(RlEncoding::kSingle); }
AuditOutcome Client::AuditHbfa() { return Run(RlEncoding::kHbfa); }
AuditOutcome Client::AuditRedactable() { return Run(RlEncoding::kRedactable); }

AuditOutcome Client::Run(std::optional<RlEncoding> expected) {
  if (wallet_.unused_count() == 0) {
    throw Error(ErrorCode::kResourceExhausted,
                "wallet has no unused pseudonyms; request more from the CA");
  }
  AuditOutcome out;
  const uint64_t received_before = channel_.bytes_received();
  try {
    const wire::Message reply = channel_.Call(wire::GetAuditStart{});
    const auto* start_msg = Expect<wire::AuditStartMsg>(reply, out, "audit start");
    if (start_msg != nullptr) {
      const AuditStart& start = start_msg->info;
      out.seed = start.seed;
      out.encoding = start.encoding;
      out.rl_version = start.version;
      if (expected && *expected != start.encoding) {
        out.detail = std::string("verifier serves a ") + RlEncodingName(start.encoding) +
                     " list";
      } else if (!GeometryConsistent(start)) {
        out.detail = "inconsistent filter geometry";
      } else {
        out.pseudonym_index = wallet_.NextUnused(start.epoch);
        const PseudonymSecret& secret = wallet_.pseudonyms()[out.pseudonym_index];
        const AccessToken token = MakeToken(secret, start.seed);
        const EncodedToken encoded = EncodeToken(token);
        switch (start.encoding) {
          case RlEncoding::kSingle: RunSingle(start, encoded, out); break;
          case RlEncoding::kHbfa: RunHbfa(start, encoded, out); break;
          case RlEncoding::kRedactable: RunRedactable(start, encoded, out); break;
        }
        if (out.status == AuditStatus::kClear) {
          out.token = token;
        } else if (out.status == AuditStatus::kRevoked) {
          wallet_.Retire(secret.pseudonym.public_key);
        }
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kResourceExhausted) throw;
    out.status = AuditStatus::kInconclusive;
    out.token.reset();
    out.detail = e.what();
  }
  out.transferred_bytes = channel_.bytes_received() - received_before;
  return out;
}

bool Client::FetchFilter(const AuditStart& start, size_t level, BloomFilter* filter,
                         AuditOutcome& out) {
  const wire::Message reply =
      channel_.Call(wire::GetFilter{static_cast<uint8_t>(level)});
  const auto* msg = Expect<wire::FilterMsg>(reply, out, "filter");
  if (msg == nullptr) return false;
  ++out.levels_fetched;
  out.filter_bytes += msg->filter.size();
  const FilterDescriptor& want = start.filters[level];
  try {
    *filter = BloomFilter::Deserialize(msg->filter);
  } catch (const Error& e) {
    out.detail = std::string("filter does not parse: ") + e.what();
    return false;
  }
  if (filter->n_bits() != want.n_bits || filter->k() != want.k ||
      filter->salt() != want.salt) {
    out.detail = "filter does not match advertised geometry";
    return false;
  }
  if (!Verify(wallet_.ca_public(), FilterSigningDigest(msg->filter, start.seed).view(),
              msg->signature)) {
    out.detail = "filter signature invalid";
    return false;
  }
  return true;
}

void Client::RunSingle(const AuditStart& start, const EncodedToken& encoded,
                       AuditOutcome& out) {
  BloomFilter filter(start.filters[0].params(), start.filters[0].salt);
  if (!FetchFilter(start, 0, &filter, out)) return;
  out.status = filter.Contains(encoded.value.view()) ? AuditStatus::kRevoked
                                                     : AuditStatus::kClear;
}

void Client::RunHbfa(const AuditStart& start, const EncodedToken& encoded,
                     AuditOutcome& out) {
  for (size_t level = 0; level < start.filters.size(); ++level) {
    BloomFilter filter(start.filters[level].params(), start.filters[level].salt);
    if (!FetchFilter(start, level, &filter, out)) return;
    if (!filter.Contains(encoded.value.view())) {
      out.status = AuditStatus::kClear;
      return;
    }
  }
  // Positive in the largest filter.
  out.status = AuditStatus::kRevoked;
}

void Client::RunRedactable(const AuditStart& start, const EncodedToken& encoded,
                           AuditOutcome& out) {
  const FilterDescriptor& f = start.filters[0];
  if (start.segment_size_bits == 0 || start.segment_size_bits % 8 != 0 ||
      start.leaf_count != SegmentCount((f.n_bits + 7) / 8, start.segment_size_bits)) {
    out.detail = "inconsistent segment geometry";
    return;
  }
  const Digest signed_digest =
      RedactableSigningDigest(start.seed, start.root, f.params(), f.salt,
                              start.segment_size_bits, start.leaf_count);
  if (!Verify(wallet_.ca_public(), signed_digest.view(), start.root_signature)) {
    out.detail = "root signature invalid";
    return;
  }
  const std::vector<uint64_t> positions = BitIndices(encoded.value.view(), f.params(), f.salt);
  // From here on the verifier has seen positions derived from this pseudonym's
  // token, so the pseudonym is retired unless the audit clears it.
  const PublicKey key = wallet_.pseudonyms()[out.pseudonym_index].pseudonym.public_key;
  const wire::Message bits_reply = channel_.Call(wire::GetBits{positions});
  const auto* bits = Expect<wire::BitsMsg>(bits_reply, out, "bits");
  if (bits == nullptr || bits->bits.size() != positions.size()) {
    if (bits != nullptr) out.detail = "bit reply has the wrong length";
    wallet_.Retire(key);
    return;
  }
  size_t zero = positions.size();
  for (size_t i = 0; i < positions.size(); ++i) {
    if (!bits->bits[i]) {
      zero = i;
      break;
    }
  }
  if (zero == positions.size()) {
    out.status = AuditStatus::kRevoked;
    return;
  }
  const uint64_t position = positions[zero];
  const wire::Message proof_reply = channel_.Call(wire::GetSegmentProof{position});
  const auto* proof_msg = Expect<wire::SegmentProofMsg>(proof_reply, out, "segment proof");
  if (proof_msg == nullptr) {
    wallet_.Retire(key);
    return;
  }
  const SegmentProof& proof = proof_msg->proof;
  const uint64_t seg_bits = start.segment_size_bits;
  const uint64_t offset = position % seg_bits;
  if (proof.segment_index != position / seg_bits || proof.segment.size() != seg_bits / 8 ||
      !VerifySegment(start.root, proof, start.leaf_count)) {
    out.detail = "segment proof does not verify";
    wallet_.Retire(key);
    return;
  }
  if ((proof.segment[offset / 8] >> (offset % 8)) & 1) {
    out.detail = "authenticated segment contradicts the bit reply";
    wallet_.Retire(key);
    return;
  }
  out.status = AuditStatus::kClear;
}

Decision Client::Authenticate(const AuditOutcome& outcome) {
  if (outcome.status != AuditStatus::kClear || !outcome.token) {
    throw Error(ErrorCode::kFailedPrecondition,
                "only a clear audit may be followed by authentication");
  }
  const PseudonymSecret& secret = wallet_.pseudonyms().at(outcome.pseudonym_index);
  if (wallet_.IsUsed(secret.pseudonym.public_key)) {
    throw Error(ErrorCode::kFailedPrecondition, "pseudonym already used");
  }
  AuthRequest request{secret.pseudonym, *outcome.token, outcome.seed};
  wallet_.Retire(secret.pseudonym.public_key);
  if (observer_) observer_(request);
  const wire::Message reply = channel_.Call(wire::Authenticate{request});
  if (const auto* d = std::get_if<wire::DecisionMsg>(&reply.body)) return d->decision;
  if (const auto* e = std::get_if<wire::ErrorMsg>(&reply.body)) {
    throw Error(ErrorCode::kTransport,
                std::string("verifier error: ") + wire::ErrorKindName(e->kind));
  }
  throw Error(ErrorCode::kTransport, "unexpected reply to authenticate");
}

}  // namespace lara
