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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ardata/episode.hpp"

namespace ardata {

inline constexpr std::uint32_t kDepthPatchEdge = 32;
inline constexpr std::uint32_t kDepthGridEdge = 10;
inline constexpr std::uint32_t kDepthCanonicalEdge = kDepthPatchEdge * kDepthGridEdge;  // 320
inline constexpr std::size_t kDepthTokenCount = kDepthGridEdge * kDepthGridEdge;      // 100
inline constexpr std::size_t kDepthCodeCount = 128;
inline constexpr std::size_t kDepthPatchSize = kDepthPatchEdge * kDepthPatchEdge;     // 1024

// Token spellings for depth perception tokens. Codes are 1-based.
struct DepthVocabulary {
  static constexpr std::string_view start = "<DEPTH_START>";
  static constexpr std::string_view end = "<DEPTH_END>";
  static std::string code(std::size_t index);
  // Sentinels followed by the 128 codes.
  static std::vector<std::string> all();
};

// 100 one-based code indices in row-major patch order.
struct DepthTokenString {
  std::vector<int> indices;

  friend bool operator==(const DepthTokenString&, const DepthTokenString&) = default;
};

class DepthCodebook {
 public:
  DepthCodebook() = default;
  DepthCodebook(std::vector<float> centroids, std::size_t k, std::uint64_t seed);

  std::size_t size() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t patch_edge() const { return kDepthPatchEdge; }
  std::uint32_t grid_edge() const { return kDepthGridEdge; }
  std::span<const float> centroid(std::size_t i) const {
    return {centroids_.data() + i * kDepthPatchSize, kDepthPatchSize};
  }
  const std::vector<float>& data() const { return centroids_; }

  // Zero-based index of the closest centroid (squared Euclidean distance,
  // ties resolved toward the lower index).
  std::size_t nearest(std::span<const float> patch) const;

  friend bool operator==(const DepthCodebook&, const DepthCodebook&) = default;

 private:
  std::vector<float> centroids_;
  std::size_t k_ = 0;
  std::uint64_t seed_ = 0;
};

struct CodebookTrainingOptions {
  std::size_t k = kDepthCodeCount;
  int max_iterations = 20;
  std::uint64_t seed = 0;
};

// Min-max normalizes to [0, 1] (a constant grid becomes all zeros) and
// resizes to 320x320 with corner-aligned bilinear sampling.
DepthGrid canonicalize_depth(const DepthGrid& grid);

// Splits a 320x320 grid into 100 row-major patches of 1024 values each.
std::vector<float> extract_patches(const DepthGrid& canonical);

// Accumulates canonical patches from many grids and fits a codebook with
// k-means++ seeding followed by Lloyd iterations.
class CodebookTrainer {
 public:
  explicit CodebookTrainer(CodebookTrainingOptions options) : options_(options) {}

  void add(const DepthGrid& grid);
  std::size_t patch_count() const { return patches_.size() / kDepthPatchSize; }
  DepthCodebook train() const;

 private:
  CodebookTrainingOptions options_;
  std::vector<float> patches_;
};

DepthCodebook train_codebook(std::span<const DepthGrid> grids, std::uint64_t seed,
                             std::size_t k = kDepthCodeCount);

DepthTokenString encode_depth(const DepthGrid& grid, const DepthCodebook& book);
DepthGrid decode_depth(const DepthTokenString& tokens, const DepthCodebook& book);

// Mean squared error between the canonical form of `grid` and its decoded
// encoding.
double reconstruction_mse(const DepthGrid& grid, const DepthCodebook& book);

void validate_depth_tokens(const DepthTokenString& tokens);

std::string render_depth_string(const DepthTokenString& tokens);

// Parses `<DEPTH_START><DEPTH_k>...<DEPTH_END>`. With `consumed` set, text
// after the closing sentinel is allowed and its offset is stored there;
// otherwise the whole input must be one depth string. Errors carry the byte
// offset of the failure.
DepthTokenString parse_depth_string(std::string_view text, std::size_t* consumed = nullptr);

// "ARCB", u32 patch_edge, u32 grid_edge, u32 k, u64 seed, k*1024 f32.
void save_codebook(const std::filesystem::path& path, const DepthCodebook& book);
DepthCodebook load_codebook(const std::filesystem::path& path);

}  // namespace ardata
