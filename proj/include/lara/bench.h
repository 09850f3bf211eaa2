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

#ifndef LARA_BENCH_H_
#define LARA_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lara/ca.h"
#include "lara/config.h"

namespace lara {

struct BenchConfig {
  // rl-generation, rl-size, hbfa-overhead, rs-overhead, expected-transfer,
  // auth-latency or all.
  std::string scenario = "all";
  uint32_t clients = 100;
  std::vector<uint64_t> pseudonyms_per_client = {10};
  RlConfig rl;
  std::vector<double> fp_grid = {1e-4, 1e-5, 1e-6};
  std::vector<uint64_t> token_counts = {1000, 10000, 100000};
  std::vector<uint64_t> levels_grid = {1, 2, 3, 4};
  std::vector<uint64_t> reduction_grid = {2, 4};
  std::vector<uint64_t> k_grid = {3, 5, 7};
  std::vector<uint64_t> filter_bits_log2 = {10, 15, 20, 25, 30};
  std::vector<uint64_t> segment_sizes = {256, 512, 1024, 4096};
  uint32_t repetitions = 5;
  uint32_t trials = 10000;
  uint64_t rng_seed = 1;
  std::string output_path;

  void Validate() const;
  // Keys: scenario, clients, pseudonyms_per_client, fp_grid, token_counts,
  // levels_grid, reduction_grid, k_grid, filter_bits_log2, segment_sizes,
  // repetitions, trials, rng_seed, out, plus the RlConfig keys.
  static BenchConfig From(const Config& config);
};

struct BenchRecord {
  std::string scenario;
  std::string metric;
  // ';'-separated key=value pairs.
  std::string parameters;
  double value = 0;
  // bytes, seconds, count or ratio.
  std::string unit;
};

inline constexpr const char* kCsvHeader = "scenario,metric,parameters,value,unit";
std::string FormatCsv(const std::vector<BenchRecord>& records);

std::vector<BenchRecord> BenchRlGeneration(const BenchConfig& config);
std::vector<BenchRecord> BenchRlSize(const BenchConfig& config);
std::vector<BenchRecord> BenchHbfaOverhead(const BenchConfig& config);
std::vector<BenchRecord> BenchRsOverhead(const BenchConfig& config);
std::vector<BenchRecord> BenchExpectedTransfer(const BenchConfig& config);
std::vector<BenchRecord> BenchAuthLatency(const BenchConfig& config);
std::vector<BenchRecord> RunBench(const BenchConfig& config);

// Serialized size of a single-filter RL file with these parameters.
uint64_t SingleRlFileSize(const FilterParams& params);

// Expected canonical filter bytes a non-revoked client downloads from an
// HBFA: s_1 + sum_{i>=2} s_i * prod_{j<i} p_j, with p_j the predicted
// false-positive rate of level j holding `tokens` elements.
double ExpectedHbfaTransfer(const std::vector<FilterParams>& levels, uint64_t tokens);

struct LatencySample {
  double median_seconds = 0;
  uint64_t transferred_bytes = 0;
  uint64_t filter_bytes = 0;
};

// Audit + authenticate over a loopback session against an RL whose
// authoritative filter has exactly n_bits bits. Every repetition uses a
// fresh pseudonym and session.
LatencySample MeasureAuthLatency(RlEncoding encoding, uint64_t n_bits, uint32_t k,
                                 uint32_t repetitions, uint64_t rng_seed,
                                 const RlConfig& base = {});

}  // namespace lara

#endif  // LARA_BENCH_H_
