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
#include <span>
#include <utility>
#include <vector>

#include "ardata/episode.hpp"

namespace ardata {

inline constexpr std::size_t kMaxTracePoints = 5;

// Point on the [0, 255]^2 trace grid.
struct TracePoint {
  int u = 0;
  int v = 0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

enum class Arm { single, left, right };

const char* to_string(Arm arm);

struct VisualTrace {
  std::vector<TracePoint> points;
  Arm arm = Arm::single;

  friend bool operator==(const VisualTrace&, const VisualTrace&) = default;
};

// Throws ValidationError unless 1 <= L <= 5 and every coordinate is in
// [0, 255].
void validate_trace(const VisualTrace& trace);

// Per-frame gripper positions of one arm over a whole episode.
using GripperTrack = std::vector<GripperPoint>;

// Track of arm `arm` (0 = single/left, 1 = right).
GripperTrack gripper_track(const Episode& episode, std::size_t arm);

// round_half_up(x * 255 / 100) per coordinate.
TracePoint rescale_point(const GripperPoint& p);

// Current frame, up to three uniformly spaced intermediates, final frame.
std::vector<std::size_t> subsample_indices(std::size_t t, std::size_t e);

VisualTrace build_trace(const GripperTrack& track, std::size_t t, std::size_t e, Arm arm = Arm::single);

std::pair<VisualTrace, VisualTrace> build_bimanual_traces(const GripperTrack& left, const GripperTrack& right,
                                                          std::size_t t, std::size_t e);

// Throws ValidationError for single-arm episodes.
std::pair<VisualTrace, VisualTrace> build_bimanual_traces(const Episode& episode, std::size_t t);

// Trace(s) for frame t of an episode, running to its final frame. Bimanual
// episodes yield [left, right].
std::vector<VisualTrace> episode_traces(const Episode& episode, std::size_t t);

}  // namespace ardata
