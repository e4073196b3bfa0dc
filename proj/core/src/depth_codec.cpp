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

#include "ardata/depth_codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_set>

#include "ardata/error.hpp"
#include "ardata/rng.hpp"
#include "binary_io.hpp"

namespace ardata {

namespace {

constexpr unsigned char kCodebookMagic[4] = {'A', 'R', 'C', 'B'};
constexpr std::string_view kCodePrefix = "<DEPTH_";

// Squared distance, accumulated one patch row at a time. Returns as soon as
// the running sum exceeds `bound`; the returned value is then only known to
// be larger than `bound`.
double squared_distance(const float* a, const float* b, double bound) {
  double acc = 0.0;
  for (std::size_t row = 0; row < kDepthPatchEdge; ++row) {
    const float* pa = a + row * kDepthPatchEdge;
    const float* pb = b + row * kDepthPatchEdge;
    for (std::size_t i = 0; i < kDepthPatchEdge; ++i) {
      const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
      acc += d * d;
    }
    if (acc > bound) return acc;
  }
  return acc;
}

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Nearest centroid given a starting guess whose distance is computed in full.
std::size_t nearest_from(const float* patch, const float* centroids, std::size_t k, std::size_t guess) {
  std::size_t best_index = guess;
  double best = squared_distance(patch, centroids + guess * kDepthPatchSize, kUnbounded);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == guess) continue;
    const double d = squared_distance(patch, centroids + j * kDepthPatchSize, best);
    if (d < best || (d == best && j < best_index)) {
      best = d;
      best_index = j;
    }
  }
  return best_index;
}

std::size_t count_distinct(const std::vector<float>& patches, std::size_t limit) {
  const std::size_t n = patches.size() / kDepthPatchSize;
  std::unordered_set<std::string_view> seen;
  const char* base = reinterpret_cast<const char*>(patches.data());
  for (std::size_t i = 0; i < n && seen.size() < limit; ++i) {
    seen.emplace(base + i * kDepthPatchSize * sizeof(float), kDepthPatchSize * sizeof(float));
  }
  return seen.size();
}

}  // namespace

std::string DepthVocabulary::code(std::size_t index) { return "<DEPTH_" + std::to_string(index) + ">"; }

std::vector<std::string> DepthVocabulary::all() {
  std::vector<std::string> out{std::string(start), std::string(end)};
  for (std::size_t k = 1; k <= kDepthCodeCount; ++k) out.push_back(code(k));
  return out;
}

DepthCodebook::DepthCodebook(std::vector<float> centroids, std::size_t k, std::uint64_t seed)
    : centroids_(std::move(centroids)), k_(k), seed_(seed) {
  if (k_ == 0 || k_ > kDepthCodeCount) {
    throw ValidationError("codebook size must be in [1, 128], got " + std::to_string(k_));
  }
  if (centroids_.size() != k_ * kDepthPatchSize) {
    throw ValidationError("codebook holds " + std::to_string(centroids_.size()) + " values, expected " +
                          std::to_string(k_ * kDepthPatchSize));
  }
  for (float v : centroids_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite codebook centroid");
  }
}

std::size_t DepthCodebook::nearest(std::span<const float> patch) const {
  return nearest_from(patch.data(), centroids_.data(), k_, 0);
}

DepthGrid canonicalize_depth(const DepthGrid& grid) {
  validate_depth_grid(grid);
  const auto [lo_it, hi_it] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double lo = *lo_it;
  const double range = static_cast<double>(*hi_it) - lo;

  std::vector<double> normalized(grid.values.size(), 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < grid.values.size(); ++i) normalized[i] = (grid.values[i] - lo) / range;
  }

  constexpr std::uint32_t edge = kDepthCanonicalEdge;
  DepthGrid out{edge, edge, std::vector<float>(std::size_t{edge} * edge)};
  const double sx = grid.width > 1 ? static_cast<double>(grid.width - 1) / (edge - 1) : 0.0;
  const double sy = grid.height > 1 ? static_cast<double>(grid.height - 1) / (edge - 1) : 0.0;
  for (std::uint32_t y = 0; y < edge; ++y) {
    const double fy = y * sy;
    const auto y0 = std::min(static_cast<std::uint32_t>(fy), grid.height - 1);
    const auto y1 = std::min(y0 + 1, grid.height - 1);
    const double wy = fy - y0;
    for (std::uint32_t x = 0; x < edge; ++x) {
      const double fx = x * sx;
      const auto x0 = std::min(static_cast<std::uint32_t>(fx), grid.width - 1);
      const auto x1 = std::min(x0 + 1, grid.width - 1);
      const double wx = fx - x0;
      const double top = normalized[std::size_t{y0} * grid.width + x0] * (1.0 - wx) +
                         normalized[std::size_t{y0} * grid.width + x1] * wx;
      const double bottom = normalized[std::size_t{y1} * grid.width + x0] * (1.0 - wx) +
                            normalized[std::size_t{y1} * grid.width + x1] * wx;
      const double v = top * (1.0 - wy) + bottom * wy;
      out.values[std::size_t{y} * edge + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

std::vector<float> extract_patches(const DepthGrid& canonical) {
  if (canonical.width != kDepthCanonicalEdge || canonical.height != kDepthCanonicalEdge) {
    throw ValidationError("patch extraction needs a 320x320 grid");
  }
  std::vector<float> out(kDepthTokenCount * kDepthPatchSize);
  float* dst = out.data();
  for (std::uint32_t py = 0; py < kDepthGridEdge; ++py) {
    for (std::uint32_t px = 0; px < kDepthGridEdge; ++px) {
      for (std::uint32_t row = 0; row < kDepthPatchEdge; ++row) {
        const float* src = canonical.values.data() + std::size_t{py * kDepthPatchEdge + row} * kDepthCanonicalEdge +
                           px * kDepthPatchEdge;
        dst = std::copy(src, src + kDepthPatchEdge, dst);
      }
    }
  }
  return out;
}

void CodebookTrainer::add(const DepthGrid& grid) {
  const auto patches = extract_patches(canonicalize_depth(grid));
  patches_.insert(patches_.end(), patches.begin(), patches.end());
}

DepthCodebook CodebookTrainer::train() const {
  const std::size_t k = options_.k;
  const std::size_t n = patch_count();
  if (k == 0 || k > kDepthCodeCount) throw ValidationError("codebook size must be in [1, 128]");
  if (count_distinct(patches_, k) < k) {
    throw ValidationError("need at least " + std::to_string(k) + " distinct patches, found " +
                          std::to_string(count_distinct(patches_, k)));
  }
  const float* data = patches_.data();
  auto patch = [&](std::size_t i) { return data + i * kDepthPatchSize; };

  // k-means++ seeding.
  Rng rng(options_.seed);
  std::vector<float> centroids;
  centroids.reserve(k * kDepthPatchSize);
  std::vector<double> d2(n, kUnbounded);
  std::size_t chosen = rng.below(n);
  for (std::size_t c = 0;; ++c) {
    centroids.insert(centroids.end(), patch(chosen), patch(chosen) + kDepthPatchSize);
    if (c + 1 == k) break;
    const float* center = centroids.data() + c * kDepthPatchSize;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = squared_distance(patch(i), center, d2[i]);
      if (d < d2[i]) d2[i] = d;
      total += d2[i];
    }
    const double target = rng.uniform() * total;
    double running = 0.0;
    chosen = n;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      last_positive = i;
      running += d2[i];
      if (running > target) {
        chosen = i;
        break;
      }
    }
    if (chosen == n) chosen = last_positive;
  }

  // Lloyd iterations.
  std::vector<std::size_t> assignment(n, 0);
  std::vector<double> sums(k * kDepthPatchSize);
  std::vector<std::size_t> counts(k);
  for (int iter = 0; iter < options_.max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = nearest_from(patch(i), centroids.data(), k, assignment[i]);
      changed = changed || a != assignment[i];
      assignment[i] = a;
    }
    if (iter > 0 && !changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* s = sums.data() + assignment[i] * kDepthPatchSize;
      const float* p = patch(i);
      for (std::size_t j = 0; j < kDepthPatchSize; ++j) s[j] += p[j];
      ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t j = 0; j < kDepthPatchSize; ++j) {
        centroids[c * kDepthPatchSize + j] =
            static_cast<float>(sums[c * kDepthPatchSize + j] / static_cast<double>(counts[c]));
      }
    }
  }
  return DepthCodebook(std::move(centroids), k, options_.seed);
}

DepthCodebook train_codebook(std::span<const DepthGrid> grids, std::uint64_t seed, std::size_t k) {
  CodebookTrainer trainer({.k = k, .max_iterations = 20, .seed = seed});
  for (const auto& g : grids) trainer.add(g);
  return trainer.train();
}

DepthTokenString encode_depth(const DepthGrid& grid, const DepthCodebook& book) {
  const auto patches = extract_patches(canonicalize_depth(grid));
  DepthTokenString out;
  out.indices.reserve(kDepthTokenCount);
  for (std::size_t p = 0; p < kDepthTokenCount; ++p) {
    const std::span<const float> patch(patches.data() + p * kDepthPatchSize, kDepthPatchSize);
    out.indices.push_back(static_cast<int>(book.nearest(patch)) + 1);
  }
  return out;
}

DepthGrid decode_depth(const DepthTokenString& tokens, const DepthCodebook& book) {
  validate_depth_tokens(tokens);
  constexpr std::uint32_t edge = kDepthCanonicalEdge;
  DepthGrid out{edge, edge, std::vector<float>(std::size_t{edge} * edge)};
  for (std::size_t p = 0; p < kDepthTokenCount; ++p) {
    const auto index = static_cast<std::size_t>(tokens.indices[p]);
    if (index > book.size()) {
      throw ValidationError("depth token " + std::to_string(index) + " exceeds codebook size " +
                            std::to_string(book.size()));
    }
    const auto centroid = book.centroid(index - 1);
    const std::size_t py = p / kDepthGridEdge;
    const std::size_t px = p % kDepthGridEdge;
    for (std::size_t row = 0; row < kDepthPatchEdge; ++row) {
      float* dst = out.values.data() + (py * kDepthPatchEdge + row) * edge + px * kDepthPatchEdge;
      const float* src = centroid.data() + row * kDepthPatchEdge;
      for (std::size_t i = 0; i < kDepthPatchEdge; ++i) dst[i] = std::clamp(src[i], 0.0f, 1.0f);
    }
  }
  return out;
}

double reconstruction_mse(const DepthGrid& grid, const DepthCodebook& book) {
  const DepthGrid canonical = canonicalize_depth(grid);
  const DepthGrid decoded = decode_depth(encode_depth(grid, book), book);
  double acc = 0.0;
  for (std::size_t i = 0; i < canonical.values.size(); ++i) {
    const double d = static_cast<double>(canonical.values[i]) - decoded.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(canonical.values.size());
}

void validate_depth_tokens(const DepthTokenString& tokens) {
  if (tokens.indices.size() != kDepthTokenCount) {
    throw ValidationError("expected 100 tokens, found " + std::to_string(tokens.indices.size()));
  }
  for (std::size_t i = 0; i < tokens.indices.size(); ++i) {
    const int v = tokens.indices[i];
    if (v < 1 || v > static_cast<int>(kDepthCodeCount)) {
      throw ValidationError("depth token " + std::to_string(v) + " at position " + std::to_string(i) +
                            " outside [1, 128]");
    }
  }
}

std::string render_depth_string(const DepthTokenString& tokens) {
  validate_depth_tokens(tokens);
  std::string out(DepthVocabulary::start);
  for (int v : tokens.indices) out += DepthVocabulary::code(static_cast<std::size_t>(v));
  out += DepthVocabulary::end;
  return out;
}

DepthTokenString parse_depth_string(std::string_view text, std::size_t* consumed) {
  auto fail = [](const std::string& what, std::size_t offset) -> ParseError {
    return ParseError(what + " at byte " + std::to_string(offset));
  };
  if (!text.starts_with(DepthVocabulary::start)) throw fail("missing <DEPTH_START>", 0);

  DepthTokenString out;
  std::size_t pos = DepthVocabulary::start.size();
  while (true) {
    const std::string_view rest = text.substr(pos);
    if (rest.starts_with(DepthVocabulary::end)) {
      pos += DepthVocabulary::end.size();
      break;
    }
    if (rest.empty()) throw fail("missing <DEPTH_END>", pos);
    if (!rest.starts_with(kCodePrefix)) {
      throw fail("missing <DEPTH_END> after " + std::to_string(out.indices.size()) + " tokens", pos);
    }
    const std::string_view digits_and_rest = rest.substr(kCodePrefix.size());
    const auto close = digits_and_rest.find('>');
    const std::string_view digits = digits_and_rest.substr(0, close);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    const bool well_formed = close != std::string_view::npos && !digits.empty() && digits[0] != '0' &&
                             ec == std::errc() && ptr == digits.data() + digits.size();
    if (!well_formed || value < 1 || value > static_cast<int>(kDepthCodeCount)) {
      throw fail("unknown depth token", pos);
    }
    out.indices.push_back(value);
    pos += kCodePrefix.size() + close + 1;
  }
  if (out.indices.size() != kDepthTokenCount) {
    throw fail("expected 100 tokens, found " + std::to_string(out.indices.size()), pos);
  }
  if (consumed) {
    *consumed = pos;
  } else if (pos != text.size()) {
    throw fail("trailing text after <DEPTH_END>", pos);
  }
  return out;
}

void save_codebook(const std::filesystem::path& path, const DepthCodebook& book) {
  std::vector<unsigned char> bytes(kCodebookMagic, kCodebookMagic + 4);
  detail::append_le<std::uint32_t>(bytes, book.patch_edge());
  detail::append_le<std::uint32_t>(bytes, book.grid_edge());
  detail::append_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(book.size()));
  detail::append_le<std::uint64_t>(bytes, book.seed());
  for (float v : book.data()) detail::append_le<float>(bytes, v);
  detail::write_file(path, bytes);
}

DepthCodebook load_codebook(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  constexpr std::size_t header = 4 + 4 + 4 + 4 + 8;
  if (bytes.size() < header || std::memcmp(bytes.data(), kCodebookMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a depth codebook (bad magic)");
  }
  const auto patch_edge = detail::load_le<std::uint32_t>(bytes.data() + 4);
  const auto grid_edge = detail::load_le<std::uint32_t>(bytes.data() + 8);
  const auto k = detail::load_le<std::uint32_t>(bytes.data() + 12);
  const auto seed = detail::load_le<std::uint64_t>(bytes.data() + 16);
  if (patch_edge != kDepthPatchEdge || grid_edge != kDepthGridEdge) {
    throw FormatError(path.string() + ": unsupported patch geometry " + std::to_string(patch_edge) + "/" +
                      std::to_string(grid_edge));
  }
  const std::size_t values = std::size_t{k} * kDepthPatchSize;
  if (bytes.size() != header + 4 * values) {
    throw FormatError(path.string() + ": payload length does not match k = " + std::to_string(k));
  }
  std::vector<float> centroids(values);
  for (std::size_t i = 0; i < values; ++i) centroids[i] = detail::load_le<float>(bytes.data() + header + 4 * i);
  return DepthCodebook(std::move(centroids), k, seed);
}

}  // namespace ardata
