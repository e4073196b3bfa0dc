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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ardata {

struct Episode;

inline constexpr int kActionBins = 256;

// Per-dimension 1st/99th percentile bounds of the discretization range.
struct ActionQuantileStats {
  std::vector<double> q01;
  std::vector<double> q99;

  std::size_t dims() const { return q01.size(); }
  bool degenerate(std::size_t dim) const { return q01[dim] == q99[dim]; }

  friend bool operator==(const ActionQuantileStats&, const ActionQuantileStats&) = default;
};

// Bins for one step (length D) or a flattened chunk (chunk_size * D).
using ActionTokenSeq = std::vector<std::uint8_t>;

// Linear interpolation between closest order statistics over a sorted
// sample (the R "type 7" estimator). `sorted` must be non-empty.
double percentile_sorted(std::span<const double> sorted, double q);

// Accumulates action vectors and reports their per-dimension q01/q99.
class QuantileFitter {
 public:
  void add(std::span<const double> action);
  void add_episode(const Episode& episode);
  std::size_t count() const;
  ActionQuantileStats finish() const;

 private:
  std::vector<std::vector<double>> columns_;
};

ActionQuantileStats fit_quantiles(std::span<const std::vector<double>> actions);

ActionTokenSeq encode_action(std::span<const double> action, const ActionQuantileStats& stats);

// Inverse of `encode_action` up to quantization: each bin maps to its center.
// `seq.size()` may be any multiple of the stats dimension.
std::vector<double> decode_action(std::span<const std::uint8_t> seq, const ActionQuantileStats& stats);
std::vector<double> decode_action(std::span<const int> bins, const ActionQuantileStats& stats);

// Encodes frames t .. t+chunk_size-1. Frames past the end of the episode
// repeat the final frame's action.
ActionTokenSeq chunk_actions(const Episode& episode, std::size_t t, const ActionQuantileStats& stats,
                             std::size_t chunk_size);

std::string stats_to_json(const ActionQuantileStats& stats);
ActionQuantileStats stats_from_json(std::string_view text);
ActionQuantileStats load_stats(const std::filesystem::path& path);
void save_stats(const std::filesystem::path& path, const ActionQuantileStats& stats);

// The 256 action symbols, index = bin. Tokens are UTF-8 strings.
class ActionVocabulary {
 public:
  explicit ActionVocabulary(std::vector<std::string> tokens);

  // Parses a JSON array of 256 strings.
  static ActionVocabulary from_json(std::string_view text);
  static ActionVocabulary load(const std::filesystem::path& path);
  // Loads the shipped table: $ARDATA_VOCAB, then the source tree data
  // directory, then the install data directory.
  static ActionVocabulary load_default();
  static std::filesystem::path default_path();

  const std::string& token(std::uint8_t bin) const { return tokens_[bin]; }
  // Returns -1 if `token` is not a vocabulary member.
  int bin(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::string> bins_to_tokens(std::span<const std::uint8_t> seq) const;
  // Throws ParseError naming the position of the first unknown token.
  ActionTokenSeq tokens_to_bins(std::span<const std::string> tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace ardata
