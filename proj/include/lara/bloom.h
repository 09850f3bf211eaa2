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

#ifndef LARA_BLOOM_H_
#define LARA_BLOOM_H_

#include <array>
#include <cstdint>
#include <vector>

#include "lara/bytes.h"

namespace lara {

using FilterSalt = std::array<uint8_t, 8>;

FilterSalt SaltFromU64(uint64_t v);
uint64_t SaltToU64(const FilterSalt& salt);

struct FilterParams {
  uint64_t n_bits = 0;
  uint32_t k = 0;

  friend bool operator==(const FilterParams&, const FilterParams&) = default;
};

inline constexpr uint64_t kMinFilterBits = 8;
inline constexpr uint32_t kMaxHashFunctions = 64;

// Bit address i (0 <= i < k) of an element is the first eight bytes of
// SHA-256(salt || be32(i) || element), read big-endian, reduced mod n_bits.
// Clients and verifiers must agree on this bit-for-bit.
std::vector<uint64_t> BitIndices(ByteView element, const FilterParams& params,
                                 const FilterSalt& salt);

// (1 - (1 - 1/n_bits)^(k * inserted))^k
double PredictedFpRate(uint64_t n_bits, uint32_t k, uint64_t inserted);

// Size and hash count minimising bits for `expected_elements` at
// `target_fp`. Throws kInvalidArgument unless 0 < target_fp < 1 and
// expected_elements > 0.
FilterParams OptimalParams(uint64_t expected_elements, double target_fp);

// Smallest filter reaching `target_fp` when the hash count is fixed to `k`.
FilterParams ParamsForFixedK(uint64_t expected_elements, double target_fp,
                             uint32_t k);

class BloomFilter {
 public:
  static constexpr std::array<uint8_t, 4> kMagic = {'L', 'B', 'F', '1'};
  static constexpr size_t kHeaderSize = 4 + 8 + 1 + 8;

  // Throws kInvalidArgument when n_bits < 8 or k is outside [1, 64].
  explicit BloomFilter(const FilterParams& params, const FilterSalt& salt = {});

  void Insert(ByteView element);
  bool Contains(ByteView element) const;
  bool ContainsAll(std::span<const uint64_t> indices) const;

  bool TestBit(uint64_t index) const;
  void SetBit(uint64_t index);
  uint64_t PopCount() const;

  uint64_t n_bits() const { return params_.n_bits; }
  uint32_t k() const { return params_.k; }
  const FilterParams& params() const { return params_; }
  const FilterSalt& salt() const { return salt_; }
  // Packed bits: bit i lives in byte i / 8 at bit position i % 8.
  ByteView payload() const { return bits_; }

  size_t SerializedSize() const { return kHeaderSize + bits_.size(); }
  std::array<uint8_t, kHeaderSize> Header() const;
  // "LBF1" || be64(n_bits) || k || salt || payload
  Bytes Serialize() const;
  // Throws kMalformed on bad magic, truncation, trailing bytes or set
  // padding bits.
  static BloomFilter Deserialize(ByteView bytes);

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  FilterParams params_;
  FilterSalt salt_;
  Bytes bits_;
};

}  // namespace lara

#endif  // LARA_BLOOM_H_
