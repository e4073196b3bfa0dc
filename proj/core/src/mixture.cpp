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

#include "ardata/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ardata/error.hpp"
#include "binary_io.hpp"

namespace ardata {

using nlohmann::json;

void check_config(const MixtureConfig& cfg) {
  if (cfg.entries.empty()) throw ConfigError("mixture has no streams");
  std::set<std::string> names;
  double sum = 0.0;
  for (const auto& e : cfg.entries) {
    if (!names.insert(e.name).second) throw ConfigError("duplicate stream '" + e.name + "'");
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      std::ostringstream msg;
      msg << "stream '" << e.name << "' has weight " << e.weight << " outside (0, 1]";
      throw ConfigError(msg.str());
    }
    sum += e.weight;
  }
  if (std::abs(sum - 1.0) > kMixtureSumTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "stream weights sum to " << sum << ", " << (sum < 1.0 ? "short of" : "over") << " 1.0 by "
        << std::abs(1.0 - sum);
    throw ConfigError(msg.str());
  }
}

MixtureConfig parse_config(std::string_view json_text) {
  MixtureConfig cfg;
  try {
    const auto j = json::parse(json_text);
    cfg.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("streams")) {
      cfg.entries.push_back({s.at("name").get<std::string>(), s.at("weight").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mixture config: ") + e.what());
  }
  check_config(cfg);
  return cfg;
}

MixtureConfig validate_config(const std::filesystem::path& path) {
  try {
    return parse_config(detail::read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

MixtureSampler::MixtureSampler(MixtureConfig cfg) : MixtureSampler(std::move(cfg), 0) {}

MixtureSampler::MixtureSampler(MixtureConfig cfg, std::uint64_t worker)
    : cfg_(std::move(cfg)), rng_(cfg_.seed ^ worker) {
  check_config(cfg_);
  double running = 0.0;
  for (const auto& e : cfg_.entries) {
    running += e.weight;
    cumulative_.push_back(running);
  }
}

std::size_t MixtureSampler::next_index() {
  const double target = rng_.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

std::vector<std::string> sample_stream(const MixtureConfig& cfg, std::size_t n) {
  MixtureSampler sampler(cfg);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace ardata
