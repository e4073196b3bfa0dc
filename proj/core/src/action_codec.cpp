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

#include "ardata/action_codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_set>

#include <json.hpp>

#include "ardata/episode.hpp"
#include "ardata/error.hpp"
#include "binary_io.hpp"

namespace ardata {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint8_t kDegenerateBin = 127;

void check_bin(int b, std::size_t pos) {
  if (b < 0 || b >= kActionBins) {
    throw ValidationError("action bin " + std::to_string(b) + " at position " + std::to_string(pos) +
                          " outside [0, 255]");
  }
}

void validate_stats(const ActionQuantileStats& stats) {
  if (stats.q01.empty() || stats.q01.size() != stats.q99.size()) {
    throw ValidationError("quantile stats need matching, non-empty q01/q99 vectors");
  }
  for (std::size_t i = 0; i < stats.dims(); ++i) {
    if (!std::isfinite(stats.q01[i]) || !std::isfinite(stats.q99[i]) || stats.q01[i] > stats.q99[i]) {
      throw ValidationError("invalid quantile bounds at dimension " + std::to_string(i));
    }
  }
}

template <typename Bin>
std::vector<double> decode_impl(std::span<const Bin> seq, const ActionQuantileStats& stats) {
  const std::size_t dims = stats.dims();
  if (dims == 0 || seq.size() % dims != 0) {
    throw ValidationError("token sequence length " + std::to_string(seq.size()) + " is not a multiple of " +
                          std::to_string(dims));
  }
  std::vector<double> out(seq.size());
  for (std::size_t pos = 0; pos < seq.size(); ++pos) {
    const int b = static_cast<int>(seq[pos]);
    check_bin(b, pos);
    const std::size_t d = pos % dims;
    if (stats.degenerate(d)) {
      out[pos] = stats.q01[d];
    } else {
      out[pos] = stats.q01[d] + (b + 0.5) * (stats.q99[d] - stats.q01[d]) / kActionBins;
    }
  }
  return out;
}

}  // namespace

double percentile_sorted(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

void QuantileFitter::add(std::span<const double> action) {
  if (action.empty()) throw ValidationError("empty action vector");
  if (columns_.empty()) {
    columns_.resize(action.size());
  } else if (action.size() != columns_.size()) {
    throw ValidationError("ragged action stream: expected " + std::to_string(columns_.size()) + " dims, got " +
                          std::to_string(action.size()));
  }
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (std::isnan(action[i])) throw ValidationError("NaN in action stream at dimension " + std::to_string(i));
    columns_[i].push_back(action[i]);
  }
}

void QuantileFitter::add_episode(const Episode& episode) {
  for (const auto& f : episode.frames) add(f.action);
}

std::size_t QuantileFitter::count() const { return columns_.empty() ? 0 : columns_.front().size(); }

ActionQuantileStats QuantileFitter::finish() const {
  if (count() == 0) throw ValidationError("cannot fit quantiles on an empty action stream");
  if (count() < 2) throw ValidationError("quantile fitting needs at least 2 samples");
  ActionQuantileStats stats;
  for (const auto& column : columns_) {
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    stats.q01.push_back(percentile_sorted(sorted, 0.01));
    stats.q99.push_back(percentile_sorted(sorted, 0.99));
  }
  return stats;
}

ActionQuantileStats fit_quantiles(std::span<const std::vector<double>> actions) {
  QuantileFitter fitter;
  for (const auto& a : actions) fitter.add(a);
  return fitter.finish();
}

ActionTokenSeq encode_action(std::span<const double> action, const ActionQuantileStats& stats) {
  if (action.size() != stats.dims()) {
    throw ValidationError("action has " + std::to_string(action.size()) + " dims, stats have " +
                          std::to_string(stats.dims()));
  }
  ActionTokenSeq out(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    if (std::isnan(action[i])) throw ValidationError("NaN action component at dimension " + std::to_string(i));
    if (stats.degenerate(i)) {
      out[i] = kDegenerateBin;
      continue;
    }
    const double scaled = (action[i] - stats.q01[i]) / (stats.q99[i] - stats.q01[i]) * kActionBins;
    const double bin = std::clamp(std::floor(scaled), 0.0, static_cast<double>(kActionBins - 1));
    out[i] = static_cast<std::uint8_t>(bin);
  }
  return out;
}

std::vector<double> decode_action(std::span<const std::uint8_t> seq, const ActionQuantileStats& stats) {
  return decode_impl(seq, stats);
}

std::vector<double> decode_action(std::span<const int> bins, const ActionQuantileStats& stats) {
  return decode_impl(bins, stats);
}

ActionTokenSeq chunk_actions(const Episode& episode, std::size_t t, const ActionQuantileStats& stats,
                             std::size_t chunk_size) {
  if (chunk_size == 0) throw ValidationError("chunk_size must be positive");
  if (t >= episode.size()) {
    throw ValidationError("timestep " + std::to_string(t) + " beyond episode of length " +
                          std::to_string(episode.size()));
  }
  ActionTokenSeq out;
  out.reserve(chunk_size * stats.dims());
  for (std::size_t k = 0; k < chunk_size; ++k) {
    const std::size_t frame = std::min(t + k, episode.size() - 1);
    const auto bins = encode_action(episode.frames[frame].action, stats);
    out.insert(out.end(), bins.begin(), bins.end());
  }
  return out;
}

std::string stats_to_json(const ActionQuantileStats& stats) {
  ordered_json j;
  j["dims"] = stats.dims();
  j["q01"] = stats.q01;
  j["q99"] = stats.q99;
  return j.dump(2) + "\n";
}

ActionQuantileStats stats_from_json(std::string_view text) {
  ActionQuantileStats stats;
  try {
    const auto j = json::parse(text);
    const auto dims = j.at("dims").get<std::size_t>();
    stats.q01 = j.at("q01").get<std::vector<double>>();
    stats.q99 = j.at("q99").get<std::vector<double>>();
    if (stats.q01.size() != dims || stats.q99.size() != dims) {
      throw ValidationError("stats: q01/q99 length does not match dims = " + std::to_string(dims));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("stats: ") + e.what());
  }
  validate_stats(stats);
  return stats;
}

ActionQuantileStats load_stats(const std::filesystem::path& path) {
  return stats_from_json(detail::read_text(path));
}

void save_stats(const std::filesystem::path& path, const ActionQuantileStats& stats) {
  validate_stats(stats);
  detail::write_text(path, stats_to_json(stats));
}

ActionVocabulary::ActionVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() != static_cast<std::size_t>(kActionBins)) {
    throw ValidationError("action vocabulary must have 256 entries, found " + std::to_string(tokens_.size()));
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw ValidationError("empty action token at bin " + std::to_string(i));
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate action token at bin " + std::to_string(i));
    }
  }
}

ActionVocabulary ActionVocabulary::from_json(std::string_view text) {
  try {
    return ActionVocabulary(json::parse(text).get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("action vocabulary: ") + e.what());
  }
}

ActionVocabulary ActionVocabulary::load(const std::filesystem::path& path) {
  return from_json(detail::read_text(path));
}

std::filesystem::path ActionVocabulary::default_path() {
  namespace fs = std::filesystem;
  if (const char* env = std::getenv("ARDATA_VOCAB"); env && *env) return env;
  const fs::path candidates[] = {fs::path(ARDATA_BUILD_DATA_DIR) / "action_vocab.json",
                                 fs::path(ARDATA_INSTALL_DATA_DIR) / "action_vocab.json"};
  for (const auto& p : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) return p;
  }
  throw IoError("action_vocab.json not found; set ARDATA_VOCAB");
}

ActionVocabulary ActionVocabulary::load_default() { return load(default_path()); }

int ActionVocabulary::bin(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> ActionVocabulary::bins_to_tokens(std::span<const std::uint8_t> seq) const {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (auto b : seq) out.push_back(tokens_[b]);
  return out;
}

ActionTokenSeq ActionVocabulary::tokens_to_bins(std::span<const std::string> tokens) const {
  ActionTokenSeq out;
  out.reserve(tokens.size());
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const int b = bin(tokens[pos]);
    if (b < 0) throw ParseError("unknown action token at position " + std::to_string(pos));
    out.push_back(static_cast<std::uint8_t>(b));
  }
  return out;
}

}  // namespace ardata
