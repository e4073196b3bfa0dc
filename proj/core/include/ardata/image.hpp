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
#include <vector>

namespace ardata {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB, row-major, no padding.
struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(std::uint32_t w, std::uint32_t h, Rgb fill = {});

  bool empty() const { return width == 0 || height == 0; }
  Rgb at(std::uint32_t x, std::uint32_t y) const;
  void set(std::uint32_t x, std::uint32_t y, Rgb c);

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Throws ValidationError if the buffer size does not match the extent.
void validate_image(const RgbImage& img);

// PNG codec (8-bit RGB, no alpha). Palette, gray and 16-bit inputs are
// converted to 8-bit RGB; alpha is stripped.
RgbImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& img);

}  // namespace ardata
