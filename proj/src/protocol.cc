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

#include "lara/protocol.h"

#include <algorithm>

namespace lara {

Digest PseudonymDigest(const PublicKey& key, uint64_t epoch) {
  uint8_t epoch_be[8];
  StoreU64BE(epoch, epoch_be);
  return Sha256Hasher().Update(key.view()).Update(epoch_be).Final();
}

Bytes Pseudonym::Encode() const {
  ByteWriter w(kEncodedSize);
  w.Append(public_key.view());
  w.U64(epoch);
  w.Append(ca_signature.view());
  return w.Take();
}

Pseudonym Pseudonym::Decode(ByteView bytes) {
  ByteReader r(bytes);
  Pseudonym p;
  p.public_key = r.ReadFixed<PublicKey>();
  p.epoch = r.U64();
  p.ca_signature = r.ReadFixed<Signature>();
  r.ExpectEnd("pseudonym");
  return p;
}

AccessToken MakeToken(const PseudonymSecret& secret, const Seed& seed) {
  const Digest seed_digest = Sha256(seed.view());
  return AccessToken{Sign(secret.secret_key, seed_digest.view())};
}

bool VerifyToken(const Pseudonym& pseudonym, const Seed& seed,
                 const AccessToken& token) {
  const Digest seed_digest = Sha256(seed.view());
  return Verify(pseudonym.public_key, seed_digest.view(), token.signature);
}

EncodedToken EncodeToken(const AccessToken& token) {
  return EncodedToken{Sha256(token.signature.view())};
}

bool ValidatePseudonym(const PublicKey& ca_public, const Pseudonym& pseudonym,
                       uint64_t current_epoch) {
  if (pseudonym.epoch != current_epoch) return false;
  const Digest d = PseudonymDigest(pseudonym.public_key, pseudonym.epoch);
  return Verify(ca_public, d.view(), pseudonym.ca_signature);
}

Bytes AuthRequest::Encode() const {
  ByteWriter w(kEncodedSize);
  w.Append(pseudonym.Encode());
  w.Append(token.signature.view());
  w.Append(seed_echo.view());
  return w.Take();
}

AuthRequest AuthRequest::Decode(ByteView bytes) {
  if (bytes.size() != kEncodedSize) {
    throw Error(ErrorCode::kMalformed, "auth request must be 200 bytes");
  }
  ByteReader r(bytes);
  AuthRequest req;
  req.pseudonym = Pseudonym::Decode(r.Read(Pseudonym::kEncodedSize));
  req.token.signature = r.ReadFixed<Signature>();
  req.seed_echo = r.ReadFixed<Seed>();
  return req;
}

const char* RlEncodingName(RlEncoding encoding) {
  switch (encoding) {
    case RlEncoding::kSingle: return "single";
    case RlEncoding::kHbfa: return "hbfa";
    case RlEncoding::kRedactable: return "redactable";
  }
  return "unknown";
}

RlEncoding ParseRlEncoding(std::string_view name) {
  if (name == "single") return RlEncoding::kSingle;
  if (name == "hbfa") return RlEncoding::kHbfa;
  if (name == "redactable" || name == "rs") return RlEncoding::kRedactable;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown encoding '" + std::string(name) + "'");
}

RlEncoding RevocationList::encoding() const {
  switch (body.index()) {
    case 0: return RlEncoding::kSingle;
    case 1: return RlEncoding::kHbfa;
    default: return RlEncoding::kRedactable;
  }
}

const BloomFilter& RevocationList::AuthoritativeFilter() const {
  if (const auto* single = std::get_if<SingleBfBody>(&body)) return single->filter;
  if (const auto* hbfa = std::get_if<HbfaBody>(&body)) return hbfa->filters.back();
  return std::get<RedactableBody>(body).filter;
}

Digest FilterSigningDigest(ByteView canonical_filter, const Seed& seed) {
  return Sha256Hasher().Update(canonical_filter).Update(seed.view()).Final();
}

Digest FilterSigningDigest(const BloomFilter& filter, const Seed& seed) {
  return Sha256Hasher()
      .Update(filter.Header())
      .Update(filter.payload())
      .Update(seed.view())
      .Final();
}

Digest RedactableSigningDigest(const Seed& seed, const Digest& root,
                               const FilterParams& params, const FilterSalt& salt,
                               uint32_t segment_size_bits, uint64_t leaf_count) {
  ByteWriter w;
  w.Append(seed.view());
  w.Append(root.view());
  w.U64(params.n_bits);
  w.U8(static_cast<uint8_t>(params.k));
  w.Append(salt);
  w.U32(segment_size_bits);
  w.U64(leaf_count);
  return Sha256(w.Take());
}

namespace {

bool VerifyFilter(const PublicKey& ca, const BloomFilter& filter, const Seed& seed,
                  const Signature& sig) {
  return Verify(ca, FilterSigningDigest(filter, seed).view(), sig);
}

}  // namespace

bool RevocationList::VerifySignatures(const PublicKey& ca_public) const {
  if (const auto* single = std::get_if<SingleBfBody>(&body)) {
    return VerifyFilter(ca_public, single->filter, seed, single->signature);
  }
  if (const auto* hbfa = std::get_if<HbfaBody>(&body)) {
    if (hbfa->filters.empty() || hbfa->filters.size() != hbfa->signatures.size()) {
      return false;
    }
    for (size_t i = 0; i < hbfa->filters.size(); ++i) {
      if (i > 0 && hbfa->filters[i].n_bits() <= hbfa->filters[i - 1].n_bits()) {
        return false;
      }
      if (!VerifyFilter(ca_public, hbfa->filters[i], seed, hbfa->signatures[i])) {
        return false;
      }
    }
    return true;
  }
  const auto& rs = std::get<RedactableBody>(body);
  const Digest d = RedactableSigningDigest(seed, rs.tree.root(), rs.filter.params(),
                                           rs.filter.salt(), rs.tree.segment_size_bits(),
                                           rs.tree.leaf_count());
  return Verify(ca_public, d.view(), rs.signature);
}

Bytes RevocationList::Serialize() const {
  ByteWriter w;
  w.Append(kMagic);
  w.U64(version);
  w.U64(epoch);
  w.U8(static_cast<uint8_t>(encoding()));
  w.Append(seed.view());
  if (const auto* single = std::get_if<SingleBfBody>(&body)) {
    w.Append(single->filter.Serialize());
    w.Append(single->signature.view());
  } else if (const auto* hbfa = std::get_if<HbfaBody>(&body)) {
    w.U8(static_cast<uint8_t>(hbfa->filters.size()));
    for (size_t i = 0; i < hbfa->filters.size(); ++i) {
      w.Append(hbfa->filters[i].Serialize());
      w.Append(hbfa->signatures[i].view());
    }
  } else {
    const auto& rs = std::get<RedactableBody>(body);
    w.Append(rs.tree.root().view());
    w.U32(rs.tree.segment_size_bits());
    w.U64(rs.tree.leaf_count());
    w.Append(rs.signature.view());
    // Materialization for verifiers: the full filter and the leaf salts.
    w.Append(rs.filter.Serialize());
    for (const LeafSalt& salt : rs.tree.leaf_salts()) w.Append(salt);
  }
  return w.Take();
}

BloomFilter ReadFilter(ByteReader& reader) {
  ByteReader peek = reader;
  peek.Read(4);
  const uint64_t n_bits = peek.U64();
  if (n_bits < kMinFilterBits || n_bits > (uint64_t{1} << 40)) {
    throw Error(ErrorCode::kMalformed, "filter size out of range");
  }
  const uint64_t total = BloomFilter::kHeaderSize + (n_bits + 7) / 8;
  return BloomFilter::Deserialize(reader.Read(total));
}

RevocationList RevocationList::Deserialize(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.Read(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw Error(ErrorCode::kMalformed, "bad revocation list magic");
  }
  const uint64_t version = r.U64();
  const uint64_t epoch = r.U64();
  const uint8_t tag = r.U8();
  const Seed seed = r.ReadFixed<Seed>();
  switch (static_cast<RlEncoding>(tag)) {
    case RlEncoding::kSingle: {
      BloomFilter filter = ReadFilter(r);
      Signature sig = r.ReadFixed<Signature>();
      r.ExpectEnd("revocation list");
      return RevocationList{version, epoch, seed, SingleBfBody{std::move(filter), sig}};
    }
    case RlEncoding::kHbfa: {
      const uint8_t levels = r.U8();
      if (levels == 0) throw Error(ErrorCode::kMalformed, "HBFA without levels");
      HbfaBody hbfa;
      for (uint8_t i = 0; i < levels; ++i) {
        hbfa.filters.push_back(ReadFilter(r));
        hbfa.signatures.push_back(r.ReadFixed<Signature>());
      }
      r.ExpectEnd("revocation list");
      return RevocationList{version, epoch, seed, std::move(hbfa)};
    }
    case RlEncoding::kRedactable: {
      const Digest root = r.ReadFixed<Digest>();
      const uint32_t segment_size_bits = r.U32();
      const uint64_t leaf_count = r.U64();
      const Signature sig = r.ReadFixed<Signature>();
      BloomFilter filter = ReadFilter(r);
      if (segment_size_bits == 0 || segment_size_bits % 8 != 0 ||
          leaf_count != SegmentCount(filter.payload().size(), segment_size_bits)) {
        throw Error(ErrorCode::kMalformed, "redactable geometry mismatch");
      }
      if (r.remaining() != leaf_count * sizeof(LeafSalt)) {
        throw Error(ErrorCode::kMalformed, "leaf salt table length mismatch");
      }
      std::vector<LeafSalt> salts(leaf_count);
      for (LeafSalt& salt : salts) {
        ByteView s = r.Read(salt.size());
        std::copy(s.begin(), s.end(), salt.begin());
      }
      MerkleTree tree =
          MerkleTree::FromSalts(filter.payload(), segment_size_bits, std::move(salts));
      if (tree.root() != root) {
        throw Error(ErrorCode::kMalformed, "materialized tree does not match root");
      }
      return RevocationList{version, epoch, seed,
                            RedactableBody{std::move(filter), std::move(tree), sig}};
    }
  }
  throw Error(ErrorCode::kMalformed, "unknown revocation list variant");
}

bool RlMembership(const RevocationList& rl, const EncodedToken& encoded) {
  return rl.AuthoritativeFilter().Contains(encoded.value.view());
}

}  // namespace lara
