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

#ifndef LARA_BYTES_H_
#define LARA_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lara/error.h"

namespace lara {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

std::string ToHex(ByteView bytes);
Bytes FromHex(std::string_view hex);

// Appends big-endian integers and raw byte runs to a growing buffer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(size_t reserve) { out_.reserve(reserve); }

  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void Append(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  size_t size() const { return out_.size(); }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked cursor over a byte span. Every read past the end throws
// Error(kMalformed).
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  uint8_t U8();
  uint16_t U16();
  uint32_t U32();
  uint64_t U64();
  ByteView Read(size_t n);
  ByteView Rest();

  template <typename Fixed>
  Fixed ReadFixed() {
    return Fixed::FromView(Read(Fixed::kSize));
  }

  size_t remaining() const { return data_.size() - pos_; }
  size_t position() const { return pos_; }
  void ExpectEnd(std::string_view what) const;

 private:
  ByteView data_;
  size_t pos_ = 0;
};

void StoreU64BE(uint64_t v, uint8_t* out);
uint64_t LoadU64BE(const uint8_t* in);

}  // namespace lara

#endif  // LARA_BYTES_H_
