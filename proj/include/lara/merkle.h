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

#ifndef LARA_MERKLE_H_
#define LARA_MERKLE_H_

#include <array>
#include <cstdint>
#include <vector>

#include "lara/bytes.h"
#include "lara/crypto.h"

// Salted Merkle tree over fixed-size segments of a filter's bit payload.
// Leaf i hashes salt_i || segment_i; internal nodes hash left || right; the
// last node of an odd-sized level is paired with itself.

namespace lara {

using LeafSalt = std::array<uint8_t, 16>;

struct ProofStep {
  Digest sibling;
  // True when the sibling is the left operand of the parent hash.
  bool sibling_on_left = false;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct SegmentProof {
  uint64_t segment_index = 0;
  Bytes segment;
  LeafSalt salt{};
  std::vector<ProofStep> siblings;

  // be64(index) || be32(len) || segment || salt || be16(count) ||
  // [digest || side]*
  Bytes Encode() const;
  static SegmentProof Decode(ByteView bytes);

  friend bool operator==(const SegmentProof&, const SegmentProof&) = default;
};

Digest LeafHash(const LeafSalt& salt, ByteView segment);
Digest NodeHash(const Digest& left, const Digest& right);

// ceil(log2(leaf_count)); 0 for a single leaf.
uint32_t TreeDepth(uint64_t leaf_count);

uint64_t SegmentCount(uint64_t payload_bytes, uint32_t segment_size_bits);

class MerkleTree {
 public:
  // Draws one fresh 16-byte salt per leaf from `rng`. segment_size_bits must
  // be a positive multiple of 8 and payload non-empty.
  static MerkleTree Build(ByteView payload, uint32_t segment_size_bits,
                          RandomSource& rng);
  // Rebuilds a tree from known salts (verifier side).
  static MerkleTree FromSalts(ByteView payload, uint32_t segment_size_bits,
                              std::vector<LeafSalt> salts);

  const Digest& root() const { return levels_.back().front(); }
  uint64_t leaf_count() const { return salts_.size(); }
  uint32_t segment_size_bits() const { return segment_size_bits_; }
  uint32_t depth() const { return static_cast<uint32_t>(levels_.size() - 1); }
  const std::vector<LeafSalt>& leaf_salts() const { return salts_; }

  // `payload` must be the same bytes the tree was built over; the tree does
  // not keep a copy. Throws kOutOfRange for index >= leaf_count.
  SegmentProof Prove(uint64_t index, ByteView payload) const;

 private:
  MerkleTree() = default;
  void Grow(ByteView payload);

  uint32_t segment_size_bits_ = 0;
  std::vector<LeafSalt> salts_;
  std::vector<std::vector<Digest>> levels_;
};

// Recomputes the root from the disclosed segment. The side flags must match
// the ones implied by segment_index, which binds the proof to its position.
bool VerifySegment(const Digest& root, const SegmentProof& proof,
                   uint64_t leaf_count);

}  // namespace lara

#endif  // LARA_MERKLE_H_
