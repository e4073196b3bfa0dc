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

#include "ardata/overlay.hpp"

#include <cstdlib>

namespace ardata {

PixelPoint trace_to_pixel(const TracePoint& p, std::uint32_t width, std::uint32_t height) {
  auto map = [](int c, std::uint32_t extent) {
    const long long span = static_cast<long long>(extent) - 1;
    return static_cast<int>((2LL * c * span + 255) / 510);
  };
  return {map(p.u, width), map(p.v, height)};
}

std::vector<PixelPoint> bresenham_line(PixelPoint a, PixelPoint b) {
  const int dx = std::abs(b.x - a.x);
  const int dy = std::abs(b.y - a.y);
  const int sx = b.x >= a.x ? 1 : -1;
  const int sy = b.y >= a.y ? 1 : -1;
  std::vector<PixelPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(dx, dy)) + 1);
  PixelPoint p = a;
  if (dx >= dy) {
    int err = 2 * dy - dx;
    for (int i = 0; i <= dx; ++i) {
      out.push_back(p);
      if (err > 0) {
        p.y += sy;
        err -= 2 * dx;
      }
      err += 2 * dy;
      p.x += sx;
    }
  } else {
    int err = 2 * dx - dy;
    for (int i = 0; i <= dy; ++i) {
      out.push_back(p);
      if (err > 0) {
        p.x += sx;
        err -= 2 * dy;
      }
      err += 2 * dx;
      p.y += sy;
    }
  }
  return out;
}

std::vector<PixelPoint> trace_stroke(const VisualTrace& trace, std::uint32_t width, std::uint32_t height) {
  validate_trace(trace);
  std::vector<PixelPoint> out;
  if (trace.points.size() == 1) {
    const PixelPoint c = trace_to_pixel(trace.points[0], width, height);
    for (int y = c.y - 2; y <= c.y + 2; ++y) {
      for (int x = c.x - 2; x <= c.x + 2; ++x) out.push_back({x, y});
    }
    return out;
  }
  for (std::size_t i = 0; i + 1 < trace.points.size(); ++i) {
    const PixelPoint a = trace_to_pixel(trace.points[i], width, height);
    const PixelPoint b = trace_to_pixel(trace.points[i + 1], width, height);
    const bool x_major = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
    for (const auto& p : bresenham_line(a, b)) {
      out.push_back(p);
      out.push_back(x_major ? PixelPoint{p.x, p.y + 1} : PixelPoint{p.x + 1, p.y});
    }
  }
  return out;
}

void draw_trace(RgbImage& img, const VisualTrace& trace, Rgb color) {
  validate_image(img);
  for (const auto& p : trace_stroke(trace, img.width, img.height)) {
    if (p.x < 0 || p.y < 0 || p.x >= static_cast<int>(img.width) || p.y >= static_cast<int>(img.height)) continue;
    img.set(static_cast<std::uint32_t>(p.x), static_cast<std::uint32_t>(p.y), color);
  }
}

RgbImage overlay_trace(const RgbImage& img, const VisualTrace& trace, Rgb color) {
  RgbImage out = img;
  draw_trace(out, trace, color);
  return out;
}

RgbImage overlay_bimanual(const RgbImage& img, const VisualTrace& left, const VisualTrace& right, Rgb left_color,
                          Rgb right_color) {
  validate_trace(left);
  validate_trace(right);
  RgbImage out = img;
  draw_trace(out, left, left_color);
  draw_trace(out, right, right_color);
  return out;
}

}  // namespace ardata
