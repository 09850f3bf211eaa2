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

#include "lara/merkle.h"

#include <algorithm>
#include <bit>

namespace lara {
namespace {

void CheckSegmentSize(uint32_t segment_size_bits) {
  if (segment_size_bits == 0 || segment_size_bits % 8 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment size must be a positive multiple of 8 bits");
  }
}

// Copies segment `index` out of the payload, zero-padding the tail.
Bytes SegmentBytes(ByteView payload, uint32_t segment_size_bits, uint64_t index) {
  const size_t seg_bytes = segment_size_bits / 8;
  Bytes out(seg_bytes, 0);
  const uint64_t begin = index * seg_bytes;
  if (begin < payload.size()) {
    const size_t n = std::min<uint64_t>(seg_bytes, payload.size() - begin);
    std::copy_n(payload.begin() + begin, n, out.begin());
  }
  return out;
}

}  // namespace

Digest LeafHash(const LeafSalt& salt, ByteView segment) {
  return Sha256Hasher().Update(salt).Update(segment).Final();
}

Digest NodeHash(const Digest& left, const Digest& right) {
  return Sha256Hasher().Update(left.view()).Update(right.view()).Final();
}

uint32_t TreeDepth(uint64_t leaf_count) {
  if (leaf_count <= 1) return 0;
  return static_cast<uint32_t>(std::bit_width(leaf_count - 1));
}

uint64_t SegmentCount(uint64_t payload_bytes, uint32_t segment_size_bits) {
  CheckSegmentSize(segment_size_bits);
  const uint64_t seg_bytes = segment_size_bits / 8;
  return (payload_bytes + seg_bytes - 1) / seg_bytes;
}

MerkleTree MerkleTree::Build(ByteView payload, uint32_t segment_size_bits,
                             RandomSource& rng) {
  CheckSegmentSize(segment_size_bits);
  if (payload.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build a tree over nothing");
  }
  std::vector<LeafSalt> salts(SegmentCount(payload.size(), segment_size_bits));
  for (LeafSalt& salt : salts) rng.Fill(salt);
  return FromSalts(payload, segment_size_bits, std::move(salts));
}

MerkleTree MerkleTree::FromSalts(ByteView payload, uint32_t segment_size_bits,
                                 std::vector<LeafSalt> salts) {
  CheckSegmentSize(segment_size_bits);
  if (payload.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot build a tree over nothing");
  }
  if (salts.size() != SegmentCount(payload.size(), segment_size_bits)) {
    throw Error(ErrorCode::kInvalidArgument, "salt count does not match segments");
  }
  MerkleTree tree;
  tree.segment_size_bits_ = segment_size_bits;
  tree.salts_ = std::move(salts);
  tree.Grow(payload);
  return tree;
}

void MerkleTree::Grow(ByteView payload) {
  const size_t seg_bytes = segment_size_bits_ / 8;
  std::vector<Digest> leaves;
  leaves.reserve(salts_.size());
  for (uint64_t i = 0; i < salts_.size(); ++i) {
    const uint64_t begin = i * seg_bytes;
    if (begin + seg_bytes <= payload.size()) {
      leaves.push_back(LeafHash(salts_[i], payload.subspan(begin, seg_bytes)));
    } else {
      leaves.push_back(LeafHash(salts_[i], SegmentBytes(payload, segment_size_bits_, i)));
    }
  }
  levels_.clear();
  levels_.push_back(std::move(leaves));
  while (levels_.back().size() > 1) {
    const std::vector<Digest>& below = levels_.back();
    std::vector<Digest> above;
    above.reserve((below.size() + 1) / 2);
    for (size_t i = 0; i < below.size(); i += 2) {
      const Digest& right = i + 1 < below.size() ? below[i + 1] : below[i];
      above.push_back(NodeHash(below[i], right));
    }
    levels_.push_back(std::move(above));
  }
}

SegmentProof MerkleTree::Prove(uint64_t index, ByteView payload) const {
  if (index >= leaf_count()) {
    throw Error(ErrorCode::kOutOfRange, "segment index beyond tree");
  }
  SegmentProof proof;
  proof.segment_index = index;
  proof.segment = SegmentBytes(payload, segment_size_bits_, index);
  proof.salt = salts_[index];
  uint64_t pos = index;
  for (size_t level = 0; level + 1 < levels_.size(); ++level) {
    const std::vector<Digest>& nodes = levels_[level];
    if (pos % 2 == 1) {
      proof.siblings.push_back({nodes[pos - 1], true});
    } else {
      const uint64_t sib = pos + 1 < nodes.size() ? pos + 1 : pos;
      proof.siblings.push_back({nodes[sib], false});
    }
    pos /= 2;
  }
  return proof;
}

bool VerifySegment(const Digest& root, const SegmentProof& proof,
                   uint64_t leaf_count) {
  if (leaf_count == 0 || proof.segment_index >= leaf_count) return false;
  if (proof.siblings.size() != TreeDepth(leaf_count)) return false;
  Digest node = LeafHash(proof.salt, proof.segment);
  uint64_t pos = proof.segment_index;
  uint64_t width = leaf_count;
  for (const ProofStep& step : proof.siblings) {
    const bool is_right = pos % 2 == 1;
    if (step.sibling_on_left != is_right) return false;
    if (is_right) {
      node = NodeHash(step.sibling, node);
    } else {
      // The last node of an odd level has no partner and pairs with itself.
      if (pos + 1 == width && step.sibling != node) return false;
      node = NodeHash(node, step.sibling);
    }
    pos /= 2;
    width = (width + 1) / 2;
  }
  return node == root;
}

Bytes SegmentProof::Encode() const {
  ByteWriter w(8 + 4 + segment.size() + 16 + 2 + siblings.size() * 33);
  w.U64(segment_index);
  w.U32(static_cast<uint32_t>(segment.size()));
  w.Append(segment);
  w.Append(salt);
  w.U16(static_cast<uint16_t>(siblings.size()));
  for (const ProofStep& step : siblings) {
    w.Append(step.sibling.view());
    w.U8(step.sibling_on_left ? 1 : 0);
  }
  return w.Take();
}

SegmentProof SegmentProof::Decode(ByteView bytes) {
  ByteReader r(bytes);
  SegmentProof proof;
  proof.segment_index = r.U64();
  const uint32_t len = r.U32();
  ByteView seg = r.Read(len);
  proof.segment.assign(seg.begin(), seg.end());
  ByteView salt = r.Read(proof.salt.size());
  std::copy(salt.begin(), salt.end(), proof.salt.begin());
  const uint16_t count = r.U16();
  if (count > 64) throw Error(ErrorCode::kMalformed, "proof path too long");
  proof.siblings.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    ProofStep step;
    step.sibling = r.ReadFixed<Digest>();
    const uint8_t side = r.U8();
    if (side > 1) throw Error(ErrorCode::kMalformed, "bad proof side flag");
    step.sibling_on_left = side == 1;
    proof.siblings.push_back(step);
  }
  r.ExpectEnd("segment proof");
  return proof;
}

}  // namespace lara
