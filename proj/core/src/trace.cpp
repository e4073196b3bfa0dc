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

#include "ardata/trace.hpp"

#include <cmath>
#include <string>

#include "ardata/error.hpp"

namespace ardata {

const char* to_string(Arm arm) {
  switch (arm) {
    case Arm::left:
      return "left";
    case Arm::right:
      return "right";
    case Arm::single:
      break;
  }
  return "single";
}

void validate_trace(const VisualTrace& trace) {
  if (trace.points.empty() || trace.points.size() > kMaxTracePoints) {
    throw ValidationError("trace length " + std::to_string(trace.points.size()) + " outside [1, 5]");
  }
  for (const auto& p : trace.points) {
    if (p.u < 0 || p.u > 255 || p.v < 0 || p.v > 255) {
      throw ValidationError("trace point (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                            ") outside [0, 255]");
    }
  }
}

GripperTrack gripper_track(const Episode& episode, std::size_t arm) {
  if (arm >= episode.arm_count()) {
    throw ValidationError("episode " + episode.id + " has no arm " + std::to_string(arm));
  }
  GripperTrack track;
  track.reserve(episode.size());
  for (const auto& f : episode.frames) track.push_back(f.gripper_points.at(arm));
  return track;
}

TracePoint rescale_point(const GripperPoint& p) {
  auto scale = [](double c) {
    if (!(c >= 0.0 && c <= 100.0)) {
      throw ValidationError("gripper coordinate " + std::to_string(c) + " outside [0, 100]");
    }
    return static_cast<int>(std::floor(c * 255.0 / 100.0 + 0.5));
  };
  return {scale(p.x), scale(p.y)};
}

std::vector<std::size_t> subsample_indices(std::size_t t, std::size_t e) {
  if (t > e) throw ValidationError("trace start " + std::to_string(t) + " after end " + std::to_string(e));
  if (t == e) return {t};
  const std::size_t span = e - t;
  const std::size_t inner = std::min<std::size_t>(3, span - 1);
  std::vector<std::size_t> out{t};
  for (std::size_t k = 1; k <= inner; ++k) {
    // t + round_half_up(k * span / (inner + 1)) in integer arithmetic.
    const std::size_t idx = t + (2 * k * span + inner + 1) / (2 * (inner + 1));
    if (idx != out.back() && idx != e) out.push_back(idx);
  }
  out.push_back(e);
  return out;
}

VisualTrace build_trace(const GripperTrack& track, std::size_t t, std::size_t e, Arm arm) {
  if (e >= track.size()) {
    throw ValidationError("track of length " + std::to_string(track.size()) + " does not cover frame " +
                          std::to_string(e));
  }
  VisualTrace trace{.points = {}, .arm = arm};
  for (std::size_t i : subsample_indices(t, e)) trace.points.push_back(rescale_point(track[i]));
  return trace;
}

std::pair<VisualTrace, VisualTrace> build_bimanual_traces(const GripperTrack& left, const GripperTrack& right,
                                                          std::size_t t, std::size_t e) {
  return {build_trace(left, t, e, Arm::left), build_trace(right, t, e, Arm::right)};
}

std::pair<VisualTrace, VisualTrace> build_bimanual_traces(const Episode& episode, std::size_t t) {
  if (episode.embodiment != Embodiment::bimanual) {
    throw ValidationError("embodiment mismatch: episode " + episode.id + " is single-arm");
  }
  const std::size_t e = episode.size() - 1;
  return build_bimanual_traces(gripper_track(episode, 0), gripper_track(episode, 1), t, e);
}

std::vector<VisualTrace> episode_traces(const Episode& episode, std::size_t t) {
  if (episode.embodiment == Embodiment::bimanual) {
    auto [left, right] = build_bimanual_traces(episode, t);
    return {std::move(left), std::move(right)};
  }
  return {build_trace(gripper_track(episode, 0), t, episode.size() - 1, Arm::single)};
}

}  // namespace ardata
