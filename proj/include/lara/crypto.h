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

#ifndef LARA_CRYPTO_H_
#define LARA_CRYPTO_H_

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

#include "lara/bytes.h"

// SHA-256 digests, Ed25519 deterministic signatures and randomness sources.
// Backed by libsodium.

namespace lara {

// Fixed-width byte string with a phantom tag so that digests, keys and
// signatures do not convert into each other.
template <size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr size_t kSize = N;

  FixedBytes() : bytes_{} {}
  explicit FixedBytes(const std::array<uint8_t, N>& bytes) : bytes_(bytes) {}

  static FixedBytes FromView(ByteView view) {
    if (view.size() != N) {
      throw Error(ErrorCode::kMalformed,
                  "expected " + std::to_string(N) + " bytes, got " +
                      std::to_string(view.size()));
    }
    FixedBytes out;
    std::memcpy(out.bytes_.data(), view.data(), N);
    return out;
  }

  static FixedBytes FromHex(std::string_view hex) {
    return FromView(lara::FromHex(hex));
  }

  uint8_t* data() { return bytes_.data(); }
  const uint8_t* data() const { return bytes_.data(); }
  static constexpr size_t size() { return N; }
  ByteView view() const { return {bytes_.data(), N}; }
  std::span<uint8_t, N> mutable_span() { return std::span<uint8_t, N>(bytes_); }
  uint8_t& operator[](size_t i) { return bytes_[i]; }
  uint8_t operator[](size_t i) const { return bytes_[i]; }
  std::string Hex() const { return ToHex(view()); }

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
  friend bool operator==(const FixedBytes&, const FixedBytes&) = default;

 private:
  std::array<uint8_t, N> bytes_;
};

struct DigestTag {};
struct SignatureTag {};
struct PublicKeyTag {};
struct SeedTag {};

using Digest = FixedBytes<32, DigestTag>;
using Signature = FixedBytes<64, SignatureTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
// Per-revocation-list random seed.
using Seed = FixedBytes<32, SeedTag>;

struct FixedBytesHash {
  template <size_t N, typename Tag>
  size_t operator()(const FixedBytes<N, Tag>& v) const {
    static_assert(N >= sizeof(size_t));
    size_t out;
    std::memcpy(&out, v.data(), sizeof(out));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Randomness.

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<uint8_t> out) = 0;

  uint64_t NextU64();
  // Uniform in [0, bound). bound must be positive.
  uint64_t Uniform(uint64_t bound);
  // Uniform in [0, 1).
  double NextUnit();
};

// Operating-system CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// ChaCha20 keystream keyed from a 64-bit seed. Reproducible runs for tests
// and benchmarks; not a source of secrets.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(uint64_t seed);
  void Fill(std::span<uint8_t> out) override;

 private:
  void Refill();

  std::array<uint8_t, 32> key_;
  uint64_t block_ = 0;
  std::array<uint8_t, 4096> buffer_;
  size_t offset_;
};

SystemRandom& DefaultRandom();

// ---------------------------------------------------------------------------
// Digest.

Digest Sha256(ByteView message);

class Sha256Hasher {
 public:
  Sha256Hasher();
  Sha256Hasher& Update(ByteView bytes);
  Digest Final();

 private:
  alignas(16) unsigned char state_[128];
};

// ---------------------------------------------------------------------------
// Signatures.

// Ed25519 signing key. Holds the 32-byte seed; the expanded libsodium form
// is cached alongside it and wiped on destruction.
class SecretKey {
 public:
  static constexpr size_t kSize = 32;

  static SecretKey FromSeed(ByteView seed);
  SecretKey(const SecretKey& other);
  SecretKey& operator=(const SecretKey& other);
  ~SecretKey();

  ByteView seed() const { return {expanded_.data(), kSize}; }
  PublicKey public_key() const;
  const uint8_t* expanded() const { return expanded_.data(); }

 private:
  SecretKey() = default;
  std::array<uint8_t, 64> expanded_{};
};

struct KeyPair {
  SecretKey secret;
  PublicKey public_key;
};

KeyPair GenerateKeyPair(RandomSource& rng);
KeyPair KeyPairFromSeed(ByteView seed);

Signature Sign(const SecretKey& key, ByteView message);
// Never throws; malformed keys or signatures verify as false.
bool Verify(const PublicKey& key, ByteView message, const Signature& sig);

Seed RandomSeed(RandomSource& rng);

// Process-wide count of Sign() invocations.
uint64_t SignatureCount();

}  // namespace lara

#endif  // LARA_CRYPTO_H_
