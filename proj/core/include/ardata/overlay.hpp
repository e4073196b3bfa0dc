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

#include <cstdint>
#include <vector>

#include "ardata/image.hpp"
#include "ardata/trace.hpp"

namespace ardata {

inline constexpr Rgb kTraceYellow{255, 255, 0};
inline constexpr Rgb kTraceCyan{0, 255, 255};

struct PixelPoint {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
  friend auto operator<=>(const PixelPoint&, const PixelPoint&) = default;
};

// Maps a [0, 255] trace coordinate onto pixel indices of an image of the
// given extent: round(u * (width - 1) / 255), halves rounded up.
PixelPoint trace_to_pixel(const TracePoint& p, std::uint32_t width, std::uint32_t height);

// Integer Bresenham line from a to b inclusive. Exact half-way cases on the
// minor axis stay on the start point's side.
std::vector<PixelPoint> bresenham_line(PixelPoint a, PixelPoint b);

// Pixels the trace stroke covers, before clipping: each line pixel plus its
// neighbour below (x-major segments) or to the right (y-major segments). A
// single-point trace covers the 5x5 square centred on the point.
std::vector<PixelPoint> trace_stroke(const VisualTrace& trace, std::uint32_t width, std::uint32_t height);

// In-place variant used by the copying overlays below; pixels outside the
// image are clipped.
void draw_trace(RgbImage& img, const VisualTrace& trace, Rgb color);

RgbImage overlay_trace(const RgbImage& img, const VisualTrace& trace, Rgb color = kTraceYellow);

// Left first in `left_color`, then right in `right_color`.
RgbImage overlay_bimanual(const RgbImage& img, const VisualTrace& left, const VisualTrace& right,
                          Rgb left_color = kTraceYellow, Rgb right_color = kTraceCyan);

}  // namespace ardata
