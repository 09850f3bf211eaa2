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

#include "lara/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lara/client.h"
#include "lara/transport.h"
#include "lara/verifier.h"

namespace lara {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string Num(uint64_t v) { return std::to_string(v); }

std::vector<EncodedToken> RandomTokens(uint64_t count, RandomSource& rng) {
  std::vector<EncodedToken> out(count);
  for (EncodedToken& t : out) rng.Fill(t.value.mutable_span());
  return out;
}

KeyPair BenchKeys(uint64_t seed) {
  DeterministicRandom rng(seed ^ 0x6b6579);
  return GenerateKeyPair(rng);
}

std::vector<uint64_t> Ordinals(uint32_t clients) {
  std::vector<uint64_t> out = {1, std::max<uint64_t>(1, clients / 10), clients};
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void BenchConfig::Validate() const {
  if (clients == 0 || repetitions == 0 || trials == 0) {
    throw Error(ErrorCode::kInvalidArgument, "bench counts must be positive");
  }
  for (auto* list : {&pseudonyms_per_client, &token_counts, &levels_grid, &reduction_grid,
                     &k_grid, &filter_bits_log2, &segment_sizes}) {
    if (list->empty() || std::find(list->begin(), list->end(), 0) != list->end()) {
      throw Error(ErrorCode::kInvalidArgument, "bench lists must hold positive values");
    }
  }
  for (double fp : fp_grid) {
    if (!(fp > 0 && fp < 1)) throw Error(ErrorCode::kInvalidArgument, "fp must be in (0, 1)");
  }
  for (uint64_t b : filter_bits_log2) {
    if (b < 3 || b > 33) throw Error(ErrorCode::kInvalidArgument, "filter_bits_log2 out of range");
  }
  for (uint64_t s : segment_sizes) {
    if (s % 8 != 0) throw Error(ErrorCode::kInvalidArgument, "segment sizes must be multiples of 8");
  }
  rl.Validate();
}

BenchConfig BenchConfig::From(const Config& c) {
  BenchConfig b;
  b.scenario = c.GetString("scenario", b.scenario);
  b.clients = static_cast<uint32_t>(c.GetU64("clients", b.clients));
  b.pseudonyms_per_client = c.GetU64List("pseudonyms_per_client", b.pseudonyms_per_client);
  b.rl = RlConfigFrom(c);
  b.fp_grid = c.GetDoubleList("fp_grid", b.fp_grid);
  b.token_counts = c.GetU64List("token_counts", b.token_counts);
  b.levels_grid = c.GetU64List("levels_grid", b.levels_grid);
  b.reduction_grid = c.GetU64List("reduction_grid", b.reduction_grid);
  b.k_grid = c.GetU64List("k_grid", b.k_grid);
  b.filter_bits_log2 = c.GetU64List("filter_bits_log2", b.filter_bits_log2);
  b.segment_sizes = c.GetU64List("segment_sizes", b.segment_sizes);
  b.repetitions = static_cast<uint32_t>(c.GetU64("repetitions", b.repetitions));
  b.trials = static_cast<uint32_t>(c.GetU64("trials", b.trials));
  b.rng_seed = c.GetU64("rng_seed", b.rng_seed);
  b.output_path = c.GetString("out", b.output_path);
  b.Validate();
  return b;
}

std::string FormatCsv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.scenario << ',' << r.metric << ',' << r.parameters << ',' << Num(r.value) << ','
        << r.unit << '\n';
  }
  return out.str();
}

uint64_t SingleRlFileSize(const FilterParams& params) {
  // magic, version, epoch, tag, seed | LBF1 | signature
  const uint64_t header = 4 + 8 + 8 + 1 + Seed::kSize;
  return header + BloomFilter::kHeaderSize + (params.n_bits + 7) / 8 + Signature::kSize;
}

double ExpectedHbfaTransfer(const std::vector<FilterParams>& levels, uint64_t tokens) {
  double expected = 0;
  double reach = 1;
  for (const FilterParams& p : levels) {
    expected += reach * static_cast<double>(BloomFilter::kHeaderSize + (p.n_bits + 7) / 8);
    reach *= PredictedFpRate(p.n_bits, p.k, tokens);
  }
  return expected;
}

std::vector<BenchRecord> BenchRlGeneration(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  const std::vector<uint64_t> ordinals = Ordinals(config.clients);
  RlConfig rl = config.rl;
  for (uint64_t ppc : config.pseudonyms_per_client) {
    for (bool precompute : {false, true}) {
      DeterministicRandom rng(config.rng_seed);
      CertificationAuthority ca(BenchKeys(config.rng_seed), rng);
      ca.set_auto_precompute(precompute);
      for (uint32_t c = 0; c < config.clients; ++c) {
        const std::string id = "client-" + std::to_string(c);
        ca.EnrollClient(id);
        ca.IssuePseudonyms(id, static_cast<uint32_t>(ppc));
      }
      if (precompute) ca.PrecomputeNext();
      size_t next = 0;
      for (uint32_t c = 0; c < config.clients; ++c) {
        const auto start = Clock::now();
        const RevocationList list = ca.RevokeClient("client-" + std::to_string(c), rl);
        const double seconds = SecondsSince(start);
        const uint64_t ordinal = c + 1;
        if (next < ordinals.size() && ordinals[next] == ordinal) {
          ++next;
          const std::string p = Params({{"ordinal", Num(ordinal)},
                                        {"pseudonyms_per_client", Num(ppc)},
                                        {"precompute", precompute ? "1" : "0"},
                                        {"encoding", RlEncodingName(rl.encoding)}});
          out.push_back({"rl-generation", "publish_signatures", p,
                         double(ca.stats().last_publish_token_signatures), "count"});
          out.push_back({"rl-generation", "revoked_tokens", p,
                         double(ca.revoked_pseudonyms().size()), "count"});
          out.push_back({"rl-generation", "rl_bytes", p, double(list.Serialize().size()),
                         "bytes"});
          out.push_back({"rl-generation", "publish_wall_time", p, seconds, "seconds"});
        }
      }
    }
  }
  return out;
}

std::vector<BenchRecord> BenchRlSize(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  DeterministicRandom rng(config.rng_seed);
  const KeyPair keys = BenchKeys(config.rng_seed);
  for (double fp : config.fp_grid) {
    RlConfig rl;
    rl.encoding = RlEncoding::kSingle;
    rl.target_fp = fp;
    rl.min_capacity = 1;
    for (uint64_t tokens : config.token_counts) {
      const std::vector<EncodedToken> encoded = RandomTokens(tokens, rng);
      const RevocationList list =
          AssembleRl(encoded, RandomSeed(rng), 1, 0, rl, keys.secret, rng);
      const double bf_bytes = double(list.Serialize().size());
      const double raw_bytes = 32.0 * double(tokens);
      const std::string p = Params({{"fp", Num(fp)}, {"tokens", Num(tokens)}});
      out.push_back({"rl-size", "bf_rl_bytes", p, bf_bytes, "bytes"});
      out.push_back({"rl-size", "raw_list_bytes", p, raw_bytes, "bytes"});
      out.push_back({"rl-size", "bf_to_raw", p, bf_bytes / raw_bytes, "ratio"});
    }
    // Large deployment, sized analytically only.
    const uint64_t tokens = 2500ull * 50000ull;
    const FilterParams params = OptimalParams(tokens, fp);
    const std::string p =
        Params({{"fp", Num(fp)}, {"tokens", Num(tokens)}, {"analytic", "1"}});
    out.push_back({"rl-size", "bf_rl_bytes", p, double(SingleRlFileSize(params)), "bytes"});
    out.push_back({"rl-size", "raw_list_bytes", p, 32.0 * double(tokens), "bytes"});
    out.push_back({"rl-size", "bf_to_raw", p,
                   double(SingleRlFileSize(params)) / (32.0 * double(tokens)), "ratio"});
  }
  return out;
}

std::vector<BenchRecord> BenchHbfaOverhead(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  DeterministicRandom rng(config.rng_seed);
  const KeyPair keys = BenchKeys(config.rng_seed);
  for (uint64_t tokens : config.token_counts) {
    const std::vector<EncodedToken> encoded = RandomTokens(tokens, rng);
    const Seed seed = RandomSeed(rng);
    for (uint64_t k : config.k_grid) {
      RlConfig single = config.rl;
      single.encoding = RlEncoding::kSingle;
      single.k = static_cast<uint32_t>(k);
      single.min_capacity = 1;
      auto start = Clock::now();
      const RevocationList base = AssembleRl(encoded, seed, 1, 0, single, keys.secret, rng);
      const double single_seconds = SecondsSince(start);
      const double single_bytes = double(std::get<SingleBfBody>(base.body).filter.SerializedSize());
      for (uint64_t levels : config.levels_grid) {
        RlConfig hbfa = single;
        hbfa.encoding = RlEncoding::kHbfa;
        hbfa.levels = static_cast<uint32_t>(levels);
        start = Clock::now();
        const RevocationList list = AssembleRl(encoded, seed, 1, 0, hbfa, keys.secret, rng);
        const double hbfa_seconds = SecondsSince(start);
        double hbfa_bytes = 0;
        for (const BloomFilter& f : std::get<HbfaBody>(list.body).filters) {
          hbfa_bytes += double(f.SerializedSize());
        }
        const std::string p = Params({{"tokens", Num(tokens)}, {"k", Num(k)},
                                      {"L", Num(levels)}, {"r", Num(uint64_t{hbfa.reduction_factor})}});
        out.push_back({"hbfa-overhead", "extra_hash_evaluations", p,
                       double(tokens * k * (levels - 1)), "count"});
        out.push_back({"hbfa-overhead", "extra_signatures", p, double(levels - 1), "count"});
        out.push_back({"hbfa-overhead", "extra_filter_bytes", p, hbfa_bytes - single_bytes,
                       "bytes"});
        out.push_back({"hbfa-overhead", "single_build_time", p, single_seconds, "seconds"});
        out.push_back({"hbfa-overhead", "hbfa_build_time", p, hbfa_seconds, "seconds"});
      }
    }
  }
  return out;
}

std::vector<BenchRecord> BenchRsOverhead(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  DeterministicRandom rng(config.rng_seed);
  const KeyPair keys = BenchKeys(config.rng_seed);
  for (uint64_t log2 : config.filter_bits_log2) {
    const uint64_t n_bits = uint64_t{1} << log2;
    BloomFilter filter({n_bits, 7}, SaltFromU64(0));
    for (const EncodedToken& t : RandomTokens(std::max<uint64_t>(1, n_bits / 64), rng)) {
      filter.Insert(t.value.view());
    }
    for (uint64_t seg : config.segment_sizes) {
      const auto start = Clock::now();
      const MerkleTree tree = MerkleTree::Build(filter.payload(), static_cast<uint32_t>(seg), rng);
      Sign(keys.secret, tree.root().view());
      const double seconds = SecondsSince(start);
      uint64_t nodes = 0;
      for (uint64_t width = tree.leaf_count(); width > 1; width = (width + 1) / 2) {
        nodes += (width + 1) / 2;
      }
      const SegmentProof proof = tree.Prove(0, filter.payload());
      const std::string p = Params({{"n_bits", Num(n_bits)}, {"segment_bits", Num(seg)}});
      out.push_back({"rs-overhead", "leaf_hashes", p, double(tree.leaf_count()), "count"});
      out.push_back({"rs-overhead", "node_hashes", p, double(nodes), "count"});
      out.push_back({"rs-overhead", "proof_bytes", p, double(proof.Encode().size()), "bytes"});
      out.push_back({"rs-overhead", "build_and_sign_time", p, seconds, "seconds"});
    }
  }
  return out;
}

std::vector<BenchRecord> BenchExpectedTransfer(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  DeterministicRandom rng(config.rng_seed);
  const KeyPair keys = BenchKeys(config.rng_seed);
  const uint64_t tokens = config.token_counts.front();
  const std::vector<EncodedToken> encoded = RandomTokens(tokens, rng);
  const Seed seed = RandomSeed(rng);
  for (double fp : config.fp_grid) {
    for (uint64_t r : config.reduction_grid) {
      for (uint64_t levels : config.levels_grid) {
        RlConfig rl = config.rl;
        rl.encoding = RlEncoding::kHbfa;
        rl.target_fp = fp;
        rl.levels = static_cast<uint32_t>(levels);
        rl.reduction_factor = static_cast<uint32_t>(r);
        rl.min_capacity = 1;
        std::vector<FilterParams> params;
        try {
          params = HbfaLevelParams(rl, tokens);
        } catch (const Error&) {
          continue;  // smallest level would be under 8 bits
        }
        const RevocationList list = AssembleRl(encoded, seed, 1, 0, rl, keys.secret, rng);
        const auto& filters = std::get<HbfaBody>(list.body).filters;
        const double largest = double(filters.back().SerializedSize());
        const double closed = ExpectedHbfaTransfer(params, tokens);
        double total = 0;
        for (uint32_t t = 0; t < config.trials; ++t) {
          Digest probe;
          rng.Fill(probe.mutable_span());
          for (const BloomFilter& f : filters) {
            total += double(f.SerializedSize());
            if (!f.Contains(probe.view())) break;
          }
        }
        const double monte_carlo = total / config.trials;
        const std::string p = Params({{"fp", Num(fp)}, {"r", Num(r)}, {"L", Num(levels)},
                                      {"k", Num(uint64_t{params.back().k})},
                                      {"tokens", Num(tokens)}, {"trials", Num(uint64_t{config.trials})}});
        out.push_back({"expected-transfer", "closed_form_bytes", p, closed, "bytes"});
        out.push_back({"expected-transfer", "monte_carlo_bytes", p, monte_carlo, "bytes"});
        out.push_back({"expected-transfer", "largest_filter_bytes", p, largest, "bytes"});
        out.push_back({"expected-transfer", "closed_form_fraction", p, closed / largest, "ratio"});
        out.push_back({"expected-transfer", "monte_carlo_fraction", p, monte_carlo / largest,
                       "ratio"});
      }
    }
  }
  return out;
}

LatencySample MeasureAuthLatency(RlEncoding encoding, uint64_t n_bits, uint32_t k,
                                 uint32_t repetitions, uint64_t rng_seed,
                                 const RlConfig& base) {
  DeterministicRandom rng(rng_seed);
  CertificationAuthority ca(BenchKeys(rng_seed), rng);
  ca.EnrollClient("revoked");
  ca.IssuePseudonyms("revoked", 16);
  ca.EnrollClient("user");
  // One extra pseudonym for an untimed warm-up run.
  Wallet wallet(ca.public_key(), ca.IssuePseudonyms("user", repetitions + 1));

  RlConfig rl = base;
  rl.encoding = encoding;
  rl.fixed_n_bits = n_bits;
  rl.k = k;
  Verifier verifier(ca.public_key());
  verifier.Install(ca.RevokeClient("revoked", rl));
  VerifierService service(verifier);

  std::vector<double> times;
  LatencySample sample;
  for (uint32_t i = 0; i <= repetitions; ++i) {
    LoopbackChannel channel(service);
    Client client(wallet, channel);
    const auto start = Clock::now();
    const AuditOutcome outcome = client.Audit();
    if (outcome.status != AuditStatus::kClear) {
      throw Error(ErrorCode::kFailedPrecondition,
                  std::string("latency audit not clear: ") + outcome.detail);
    }
    const Decision decision = client.Authenticate(outcome);
    if (i > 0) times.push_back(SecondsSince(start));
    if (decision != Decision::kAccept) {
      throw Error(ErrorCode::kFailedPrecondition, "latency authentication rejected");
    }
    sample.transferred_bytes = outcome.transferred_bytes;
    sample.filter_bytes = outcome.filter_bytes;
  }
  std::sort(times.begin(), times.end());
  sample.median_seconds = times[times.size() / 2];
  return sample;
}

std::vector<BenchRecord> BenchAuthLatency(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  for (RlEncoding encoding : {RlEncoding::kSingle, RlEncoding::kHbfa, RlEncoding::kRedactable}) {
    for (uint64_t log2 : config.filter_bits_log2) {
      const uint64_t n_bits = uint64_t{1} << log2;
      // Large filters are slow to move; fewer repetitions there.
      const uint32_t reps = log2 <= 20 ? config.repetitions * 5 : config.repetitions;
      const uint32_t k = config.rl.k == 0 ? 7 : config.rl.k;
      const LatencySample s =
          MeasureAuthLatency(encoding, n_bits, k, reps, config.rng_seed, config.rl);
      const std::string p = Params({{"encoding", RlEncodingName(encoding)},
                                    {"n_bits", Num(n_bits)}, {"repetitions", Num(uint64_t{reps})}});
      out.push_back({"auth-latency", "transferred_bytes", p, double(s.transferred_bytes), "bytes"});
      out.push_back({"auth-latency", "median_latency", p, s.median_seconds, "seconds"});
    }
  }
  return out;
}

std::vector<BenchRecord> RunBench(const BenchConfig& config) {
  config.Validate();
  using Fn = std::vector<BenchRecord> (*)(const BenchConfig&);
  const std::pair<const char*, Fn> scenarios[] = {
      {"rl-generation", BenchRlGeneration},   {"rl-size", BenchRlSize},
      {"hbfa-overhead", BenchHbfaOverhead},   {"rs-overhead", BenchRsOverhead},
      {"expected-transfer", BenchExpectedTransfer}, {"auth-latency", BenchAuthLatency},
  };
  std::vector<BenchRecord> out;
  bool matched = false;
  for (const auto& [name, fn] : scenarios) {
    if (config.scenario == "all" || config.scenario == name) {
      matched = true;
      std::vector<BenchRecord> part = fn(config);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  if (!matched) throw Error(ErrorCode::kInvalidArgument, "unknown scenario " + config.scenario);
  return out;
}

}  // namespace lara
