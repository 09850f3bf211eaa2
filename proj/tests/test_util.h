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

#ifndef LARA_TESTS_TEST_UTIL_H_
#define LARA_TESTS_TEST_UTIL_H_

#include <string>
#include <vector>

#include "lara/ca.h"
#include "lara/crypto.h"

namespace lara::testing {

inline KeyPair TestKeys(uint64_t seed = 7) {
  DeterministicRandom rng(seed);
  return GenerateKeyPair(rng);
}

inline std::vector<EncodedToken> RandomTokens(size_t n, RandomSource& rng) {
  std::vector<EncodedToken> out(n);
  for (EncodedToken& t : out) rng.Fill(t.value.mutable_span());
  return out;
}

inline RlConfig SmallConfig(RlEncoding encoding) {
  RlConfig c;
  c.encoding = encoding;
  c.min_capacity = 64;
  c.target_fp = 1e-3;
  return c;
}

}  // namespace lara::testing

#endif  // LARA_TESTS_TEST_UTIL_H_
