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

#include "lara/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lara {

namespace {

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

uint64_t ParseU64(const std::string& key, const std::string& s) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "config: " + key + " is not an unsigned integer");
  }
  return v;
}

double ParseDouble(const std::string& key, const std::string& s) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "config: " + key + " is not a number");
  }
  return v;
}

}  // namespace

Config Config::Parse(const std::string& text) {
  Config config;
  std::stringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_no) + ": empty key");
    }
    if (!config.values_.emplace(key, value).second) {
      throw Error(ErrorCode::kInvalidArgument, "config: duplicate key " + key);
    }
  }
  return config;
}

Config Config::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string Config::GetString(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

uint64_t Config::GetU64(const std::string& key, uint64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseU64(key, it->second);
}

double Config::GetDouble(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : ParseDouble(key, it->second);
}

std::vector<uint64_t> Config::GetU64List(const std::string& key,
                                         const std::vector<uint64_t>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<uint64_t> out;
  for (const std::string& item : SplitList(it->second)) out.push_back(ParseU64(key, item));
  return out;
}

std::vector<double> Config::GetDoubleList(const std::string& key,
                                          const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const std::string& item : SplitList(it->second)) out.push_back(ParseDouble(key, item));
  return out;
}

RlConfig RlConfigFrom(const Config& config) {
  RlConfig rl;
  if (config.Has("encoding")) rl.encoding = ParseRlEncoding(config.GetString("encoding", ""));
  rl.target_fp = config.GetDouble("target_fp", rl.target_fp);
  rl.min_capacity = config.GetU64("min_capacity", rl.min_capacity);
  rl.k = static_cast<uint32_t>(config.GetU64("k", rl.k));
  rl.levels = static_cast<uint32_t>(config.GetU64("levels", rl.levels));
  rl.reduction_factor =
      static_cast<uint32_t>(config.GetU64("reduction_factor", rl.reduction_factor));
  rl.segment_size_bits =
      static_cast<uint32_t>(config.GetU64("segment_size_bits", rl.segment_size_bits));
  rl.fixed_n_bits = config.GetU64("fixed_n_bits", rl.fixed_n_bits);
  rl.Validate();
  return rl;
}

}  // namespace lara
