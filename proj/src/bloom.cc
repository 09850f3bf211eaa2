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

#include "lara/bloom.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "lara/crypto.h"

namespace lara {

FilterSalt SaltFromU64(uint64_t v) {
  FilterSalt salt;
  StoreU64BE(v, salt.data());
  return salt;
}

uint64_t SaltToU64(const FilterSalt& salt) { return LoadU64BE(salt.data()); }

std::vector<uint64_t> BitIndices(ByteView element, const FilterParams& params,
                                 const FilterSalt& salt) {
  std::vector<uint64_t> out;
  out.reserve(params.k);
  for (uint32_t i = 0; i < params.k; ++i) {
    const uint8_t counter[4] = {
        static_cast<uint8_t>(i >> 24), static_cast<uint8_t>(i >> 16),
        static_cast<uint8_t>(i >> 8), static_cast<uint8_t>(i)};
    Digest h = Sha256Hasher().Update(salt).Update(counter).Update(element).Final();
    out.push_back(LoadU64BE(h.data()) % params.n_bits);
  }
  return out;
}

double PredictedFpRate(uint64_t n_bits, uint32_t k, uint64_t inserted) {
  if (n_bits == 0 || k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_bits and k must be positive");
  }
  if (inserted == 0) return 0.0;
  // 1 - (1 - 1/n)^(k*m), evaluated without cancellation.
  const double exponent = static_cast<double>(k) * static_cast<double>(inserted) *
                          std::log1p(-1.0 / static_cast<double>(n_bits));
  const double bit_set = -std::expm1(exponent);
  return std::pow(bit_set, static_cast<double>(k));
}

namespace {
void CheckSizingInputs(uint64_t expected_elements, double target_fp) {
  if (!(target_fp > 0.0 && target_fp < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_fp must be in (0, 1)");
  }
  if (expected_elements == 0) {
    throw Error(ErrorCode::kInvalidArgument, "expected_elements must be positive");
  }
}
}  // namespace

FilterParams OptimalParams(uint64_t expected_elements, double target_fp) {
  CheckSizingInputs(expected_elements, target_fp);
  const double m = static_cast<double>(expected_elements);
  const double ln2 = std::numbers::ln2;
  FilterParams params;
  params.n_bits = std::max(
      static_cast<uint64_t>(std::ceil(-m * std::log(target_fp) / (ln2 * ln2))), kMinFilterBits);
  const double k = std::round(static_cast<double>(params.n_bits) / m * ln2);
  params.k = static_cast<uint32_t>(std::clamp(k, 1.0, double{kMaxHashFunctions}));
  return params;
}

FilterParams ParamsForFixedK(uint64_t expected_elements, double target_fp,
                             uint32_t k) {
  CheckSizingInputs(expected_elements, target_fp);
  if (k == 0 || k > kMaxHashFunctions) {
    throw Error(ErrorCode::kInvalidArgument, "k must be in [1, 64]");
  }
  // Solve (1 - exp(-k m / n))^k = p for n.
  const double m = static_cast<double>(expected_elements);
  const double per_bit = std::pow(target_fp, 1.0 / k);
  const double n = -static_cast<double>(k) * m / std::log1p(-per_bit);
  // The exponential form is an approximation; settle on the exact rate.
  uint64_t bits = std::max(static_cast<uint64_t>(std::ceil(n)), kMinFilterBits);
  while (PredictedFpRate(bits, k, expected_elements) > target_fp) ++bits;
  while (bits > kMinFilterBits && PredictedFpRate(bits - 1, k, expected_elements) <= target_fp) {
    --bits;
  }
  return FilterParams{bits, k};
}

BloomFilter::BloomFilter(const FilterParams& params, const FilterSalt& salt)
    : params_(params), salt_(salt) {
  if (params.n_bits < kMinFilterBits) {
    throw Error(ErrorCode::kInvalidArgument, "filter needs at least 8 bits");
  }
  if (params.k == 0 || params.k > kMaxHashFunctions) {
    throw Error(ErrorCode::kInvalidArgument, "k must be in [1, 64]");
  }
  bits_.assign((params.n_bits + 7) / 8, 0);
}

void BloomFilter::Insert(ByteView element) {
  for (uint64_t index : BitIndices(element, params_, salt_)) SetBit(index);
}

bool BloomFilter::Contains(ByteView element) const {
  return ContainsAll(BitIndices(element, params_, salt_));
}

bool BloomFilter::ContainsAll(std::span<const uint64_t> indices) const {
  return std::all_of(indices.begin(), indices.end(),
                     [this](uint64_t i) { return TestBit(i); });
}

bool BloomFilter::TestBit(uint64_t index) const {
  if (index >= params_.n_bits) {
    throw Error(ErrorCode::kOutOfRange, "bit index beyond filter");
  }
  return (bits_[index / 8] >> (index % 8)) & 1;
}

void BloomFilter::SetBit(uint64_t index) {
  if (index >= params_.n_bits) {
    throw Error(ErrorCode::kOutOfRange, "bit index beyond filter");
  }
  bits_[index / 8] |= static_cast<uint8_t>(1u << (index % 8));
}

uint64_t BloomFilter::PopCount() const {
  uint64_t total = 0;
  for (uint8_t b : bits_) total += std::popcount(b);
  return total;
}

std::array<uint8_t, BloomFilter::kHeaderSize> BloomFilter::Header() const {
  std::array<uint8_t, kHeaderSize> header;
  std::copy(kMagic.begin(), kMagic.end(), header.begin());
  StoreU64BE(params_.n_bits, header.data() + 4);
  header[12] = static_cast<uint8_t>(params_.k);
  std::copy(salt_.begin(), salt_.end(), header.begin() + 13);
  return header;
}

Bytes BloomFilter::Serialize() const {
  ByteWriter w(SerializedSize());
  w.Append(Header());
  w.Append(bits_);
  return w.Take();
}

BloomFilter BloomFilter::Deserialize(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.Read(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw Error(ErrorCode::kMalformed, "bad filter magic");
  }
  FilterParams params;
  params.n_bits = r.U64();
  params.k = r.U8();
  FilterSalt salt;
  ByteView salt_bytes = r.Read(salt.size());
  std::copy(salt_bytes.begin(), salt_bytes.end(), salt.begin());
  if (params.n_bits < kMinFilterBits || params.k == 0 || params.k > kMaxHashFunctions) {
    throw Error(ErrorCode::kMalformed, "filter parameters out of range");
  }
  const uint64_t payload_size = (params.n_bits + 7) / 8;
  if (payload_size != r.remaining()) {
    throw Error(ErrorCode::kMalformed, "filter payload length mismatch");
  }
  BloomFilter filter(params, salt);
  ByteView payload = r.Read(payload_size);
  std::copy(payload.begin(), payload.end(), filter.bits_.begin());
  if (const uint64_t tail = params.n_bits % 8; tail != 0) {
    if (filter.bits_.back() >> tail) {
      throw Error(ErrorCode::kMalformed, "nonzero filter padding bits");
    }
  }
  return filter;
}

}  // namespace lara
