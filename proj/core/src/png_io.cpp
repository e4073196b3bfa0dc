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

#include "ardata/image.hpp"

#include <png.h>

#include <cstring>
#include <string>

#include "ardata/error.hpp"
#include "binary_io.hpp"

namespace ardata {

RgbImage::RgbImage(std::uint32_t w, std::uint32_t h, Rgb fill) : width(w), height(h), pixels(std::size_t{w} * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb RgbImage::at(std::uint32_t x, std::uint32_t y) const {
  const std::size_t i = (std::size_t{y} * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(std::uint32_t x, std::uint32_t y, Rgb c) {
  const std::size_t i = (std::size_t{y} * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

void validate_image(const RgbImage& img) {
  if (img.empty()) throw ValidationError("empty image");
  if (img.pixels.size() != std::size_t{img.width} * img.height * 3) {
    throw ValidationError("pixel buffer does not match " + std::to_string(img.width) + "x" +
                          std::to_string(img.height));
  }
}

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_callback(png_structp) {}

[[noreturn]] void error_callback(png_structp, png_const_charp message) { throw FormatError(std::string("PNG: ") + message); }

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");

  ReadCursor cursor{bytes, 0};
  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);

  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png), png_set_strip_alpha(png);
  png_read_update_info(png, info);

  RgbImage img(png_get_image_width(png, info), png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != std::size_t{img.width} * 3) throw FormatError("PNG: unexpected row layout");
  std::vector<png_bytep> rows(img.height);
  for (std::uint32_t y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + std::size_t{y} * img.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  return img;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  validate_image(img);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw Error("png_create_info_struct failed");

  std::vector<std::uint8_t> out;
  png_set_write_fn(png, &out, write_callback, flush_callback);
  // Fixed encoder settings so identical pixels give identical bytes.
  png_set_compression_level(png, 9);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::uint32_t y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + std::size_t{y} * img.width * 3));
  }
  png_write_end(png, nullptr);
  return out;
}

RgbImage read_png(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_png(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path& path, const RgbImage& img) { detail::write_file(path, encode_png(img)); }

}  // namespace ardata
