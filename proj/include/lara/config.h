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

#ifndef LARA_CONFIG_H_
#define LARA_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lara/ca.h"

// Flat `key = value` text. '#' starts a comment; blank lines are ignored.
// Keys are unique. Lists are comma separated.

namespace lara {

class Config {
 public:
  static Config Parse(const std::string& text);
  static Config Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.contains(key); }
  void Set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string GetString(const std::string& key, const std::string& fallback) const;
  uint64_t GetU64(const std::string& key, uint64_t fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::vector<uint64_t> GetU64List(const std::string& key,
                                   const std::vector<uint64_t>& fallback) const;
  std::vector<double> GetDoubleList(const std::string& key,
                                    const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Reads encoding, target_fp, min_capacity, k, levels, reduction_factor,
// segment_size_bits and fixed_n_bits. Missing keys keep their defaults.
RlConfig RlConfigFrom(const Config& config);

}  // namespace lara

#endif  // LARA_CONFIG_H_
