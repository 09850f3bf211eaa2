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

#ifndef LARA_PROTOCOL_H_
#define LARA_PROTOCOL_H_

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "lara/bloom.h"
#include "lara/bytes.h"
#include "lara/crypto.h"
#include "lara/merkle.h"

// Domain objects shared by the CA, verifiers and clients, and the pure
// computations over them.

namespace lara {

// A CA-certified one-time public key. Carries nothing that identifies the
// client it was issued to.
struct Pseudonym {
  static constexpr size_t kEncodedSize = 32 + 8 + 64;

  PublicKey public_key;
  uint64_t epoch = 0;
  // CA signature over SHA-256(public_key || be64(epoch)).
  Signature ca_signature;

  Bytes Encode() const;
  static Pseudonym Decode(ByteView bytes);

  friend bool operator==(const Pseudonym&, const Pseudonym&) = default;
};

Digest PseudonymDigest(const PublicKey& key, uint64_t epoch);

// Client/CA-only: the pseudonym together with its signing key.
struct PseudonymSecret {
  Pseudonym pseudonym;
  SecretKey secret_key;
};

struct AccessToken {
  Signature signature;

  friend bool operator==(const AccessToken&, const AccessToken&) = default;
};

// One-way image of an access token; the only form stored in RLs.
struct EncodedToken {
  Digest value;

  friend auto operator<=>(const EncodedToken&, const EncodedToken&) = default;
};

// sign(secret, SHA-256(seed)). Deterministic in (secret, seed).
AccessToken MakeToken(const PseudonymSecret& secret, const Seed& seed);
bool VerifyToken(const Pseudonym& pseudonym, const Seed& seed,
                 const AccessToken& token);
EncodedToken EncodeToken(const AccessToken& token);

bool ValidatePseudonym(const PublicKey& ca_public, const Pseudonym& pseudonym,
                       uint64_t current_epoch);

struct AuthRequest {
  static constexpr size_t kEncodedSize = Pseudonym::kEncodedSize + 64 + 32;

  Pseudonym pseudonym;
  AccessToken token;
  Seed seed_echo;

  // pseudonym || token signature || seed_echo
  Bytes Encode() const;
  static AuthRequest Decode(ByteView bytes);

  friend bool operator==(const AuthRequest&, const AuthRequest&) = default;
};

// ---------------------------------------------------------------------------
// Revocation lists.

enum class RlEncoding : uint8_t {
  kSingle = 0x01,
  kHbfa = 0x02,
  kRedactable = 0x03,
};

const char* RlEncodingName(RlEncoding encoding);
RlEncoding ParseRlEncoding(std::string_view name);

struct SingleBfBody {
  BloomFilter filter;
  // Over SHA-256(LBF1(filter) || seed).
  Signature signature;
};

struct HbfaBody {
  // Strictly ascending in n_bits; every level holds the same token set.
  std::vector<BloomFilter> filters;
  // signatures[i] over SHA-256(LBF1(filters[i]) || seed).
  std::vector<Signature> signatures;
};

struct RedactableBody {
  BloomFilter filter;
  MerkleTree tree;
  // Over RedactableSigningDigest(seed, tree.root(), ...).
  Signature signature;
};

struct RevocationList {
  static constexpr std::array<uint8_t, 4> kMagic = {'L', 'R', 'L', '1'};

  uint64_t version = 0;
  uint64_t epoch = 0;
  Seed seed;
  std::variant<SingleBfBody, HbfaBody, RedactableBody> body;

  RlEncoding encoding() const;
  // The filter whose answer decides membership: the single filter, the
  // largest HBFA level, or the full filter under the Merkle tree.
  const BloomFilter& AuthoritativeFilter() const;
  // Every CA signature in the list verifies under `ca_public`.
  bool VerifySignatures(const PublicKey& ca_public) const;

  // "LRL1" || be64(version) || be64(epoch) || tag || seed || body.
  Bytes Serialize() const;
  static RevocationList Deserialize(ByteView bytes);
};

// SHA-256(canonical_filter || seed)
Digest FilterSigningDigest(ByteView canonical_filter, const Seed& seed);
// Same digest, streamed from the filter without materializing LBF1 bytes.
Digest FilterSigningDigest(const BloomFilter& filter, const Seed& seed);

// SHA-256(seed || root || be64(n_bits) || k || filter salt ||
//         be32(segment_size_bits) || be64(leaf_count))
Digest RedactableSigningDigest(const Seed& seed, const Digest& root,
                               const FilterParams& params, const FilterSalt& salt,
                               uint32_t segment_size_bits, uint64_t leaf_count);

bool RlMembership(const RevocationList& rl, const EncodedToken& encoded);

// Reads one self-delimiting LBF1 filter from the stream.
BloomFilter ReadFilter(ByteReader& reader);

}  // namespace lara

#endif  // LARA_PROTOCOL_H_
