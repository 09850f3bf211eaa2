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

#include "lara/crypto.h"

#include <sodium.h>

#include <atomic>
#include <limits>

namespace lara {
namespace {

std::atomic<uint64_t> g_signatures{0};

void EnsureSodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw Error(ErrorCode::kEntropy, "libsodium failed to initialize");
}

static_assert(sizeof(crypto_hash_sha256_state) <= 128);

}  // namespace

uint64_t RandomSource::NextU64() {
  uint8_t buf[8];
  Fill(buf);
  return LoadU64BE(buf);
}

uint64_t RandomSource::Uniform(uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "Uniform(0)");
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % bound;
  for (;;) {
    uint64_t v = NextU64();
    if (v < limit) return v % bound;
  }
}

double RandomSource::NextUnit() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

void SystemRandom::Fill(std::span<uint8_t> out) {
  EnsureSodium();
  randombytes_buf(out.data(), out.size());
}

SystemRandom& DefaultRandom() {
  static SystemRandom rng;
  return rng;
}

DeterministicRandom::DeterministicRandom(uint64_t seed) {
  EnsureSodium();
  uint8_t seed_bytes[8];
  StoreU64BE(seed, seed_bytes);
  Digest key = Sha256(seed_bytes);
  std::memcpy(key_.data(), key.data(), key_.size());
  Refill();
}

void DeterministicRandom::Refill() {
  uint8_t nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  StoreU64BE(block_++, nonce + 4);
  crypto_stream_chacha20_ietf(buffer_.data(), buffer_.size(), nonce, key_.data());
  offset_ = 0;
}

void DeterministicRandom::Fill(std::span<uint8_t> out) {
  size_t written = 0;
  while (written < out.size()) {
    if (offset_ == buffer_.size()) Refill();
    size_t n = std::min(out.size() - written, buffer_.size() - offset_);
    std::memcpy(out.data() + written, buffer_.data() + offset_, n);
    offset_ += n;
    written += n;
  }
}

Digest Sha256(ByteView message) {
  EnsureSodium();
  Digest out;
  crypto_hash_sha256(out.data(), message.data(), message.size());
  return out;
}

Sha256Hasher::Sha256Hasher() {
  EnsureSodium();
  crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_));
}

Sha256Hasher& Sha256Hasher::Update(ByteView bytes) {
  crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_),
                            bytes.data(), bytes.size());
  return *this;
}

Digest Sha256Hasher::Final() {
  Digest out;
  crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_),
                           out.data());
  return out;
}

SecretKey SecretKey::FromSeed(ByteView seed) {
  if (seed.size() != kSize) {
    throw Error(ErrorCode::kInvalidArgument, "secret key must be 32 bytes");
  }
  EnsureSodium();
  SecretKey key;
  uint8_t pk[crypto_sign_PUBLICKEYBYTES];
  crypto_sign_seed_keypair(pk, key.expanded_.data(), seed.data());
  return key;
}

SecretKey::SecretKey(const SecretKey& other) : expanded_(other.expanded_) {}

SecretKey& SecretKey::operator=(const SecretKey& other) {
  expanded_ = other.expanded_;
  return *this;
}

SecretKey::~SecretKey() { sodium_memzero(expanded_.data(), expanded_.size()); }

PublicKey SecretKey::public_key() const {
  // libsodium stores the public key in the upper half of the expanded key.
  return PublicKey::FromView(ByteView(expanded_).subspan(32));
}

KeyPair GenerateKeyPair(RandomSource& rng) {
  std::array<uint8_t, 32> seed;
  rng.Fill(seed);
  KeyPair pair = KeyPairFromSeed(seed);
  sodium_memzero(seed.data(), seed.size());
  return pair;
}

KeyPair KeyPairFromSeed(ByteView seed) {
  SecretKey secret = SecretKey::FromSeed(seed);
  PublicKey pub = secret.public_key();
  return KeyPair{std::move(secret), pub};
}

Signature Sign(const SecretKey& key, ByteView message) {
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       key.expanded());
  g_signatures.fetch_add(1, std::memory_order_relaxed);
  return sig;
}

bool Verify(const PublicKey& key, ByteView message, const Signature& sig) {
  EnsureSodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                     key.data()) == 0;
}

Seed RandomSeed(RandomSource& rng) {
  Seed seed;
  rng.Fill(seed.mutable_span());
  return seed;
}

uint64_t SignatureCount() { return g_signatures.load(std::memory_order_relaxed); }

}  // namespace lara
