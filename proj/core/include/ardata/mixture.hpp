// Copyright 2026 The ardata Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ardata/rng.hpp"

namespace ardata {

inline constexpr double kMixtureSumTolerance = 1e-9;

struct MixtureEntry {
  std::string name;
  double weight = 0.0;
};

struct MixtureConfig {
  std::vector<MixtureEntry> entries;
  std::uint64_t seed = 0;
};

// Throws ConfigError for duplicate names, weights outside (0, 1] or a sum
// off 1.0 by more than 1e-9.
void check_config(const MixtureConfig& cfg);

// {"seed": u64, "streams": [{"name": str, "weight": float}, ...]}
MixtureConfig parse_config(std::string_view json_text);
MixtureConfig validate_config(const std::filesystem::path& path);

// Categorical draws over the configured streams. Each draw consumes one
// uniform variate u and picks the first stream whose cumulative weight
// exceeds u * total.
class MixtureSampler {
 public:
  explicit MixtureSampler(MixtureConfig cfg);
  // Per-worker sampler seeded with cfg.seed ^ worker.
  MixtureSampler(MixtureConfig cfg, std::uint64_t worker);

  std::size_t next_index();
  const std::string& next() { return cfg_.entries[next_index()].name; }
  const MixtureConfig& config() const { return cfg_; }

 private:
  MixtureConfig cfg_;
  std::vector<double> cumulative_;
  Rng rng_;
};

std::vector<std::string> sample_stream(const MixtureConfig& cfg, std::size_t n);

}  // namespace ardata
