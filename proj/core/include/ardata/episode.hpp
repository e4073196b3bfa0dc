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
#include <optional>
#include <string>
#include <vector>

namespace ardata {

// Gripper location as predicted in image space: x is the column fraction and
// y the row fraction, both percentages in [0, 100].
struct GripperPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GripperPoint&, const GripperPoint&) = default;
};

enum class Embodiment { single_arm, bimanual };

const char* to_string(Embodiment e);

struct Frame {
  std::uint32_t index = 0;
  // Primary side view first, then an optional secondary side view, then
  // wrist views. Paths are relative to the episode root.
  std::vector<std::string> rgb_refs;
  std::optional<std::string> depth_ref;
  // One entry per arm; bimanual order is [left, right].
  std::vector<GripperPoint> gripper_points;
  std::vector<double> action;
  std::string instruction;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Episode {
  std::string id;
  std::string source;
  Embodiment embodiment = Embodiment::single_arm;
  std::vector<Frame> frames;
  // Directory the frame references resolve against. Not serialized.
  std::filesystem::path root;

  std::size_t size() const { return frames.size(); }
  std::size_t action_dims() const { return frames.empty() ? 0 : frames.front().action.size(); }
  std::size_t arm_count() const { return embodiment == Embodiment::bimanual ? 2 : 1; }
  const std::string& instruction() const { return frames.front().instruction; }
};

// Relative (unitless) depth for one camera view, row-major.
struct DepthGrid {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> values;

  float at(std::uint32_t x, std::uint32_t y) const { return values[std::size_t{y} * width + x]; }

  friend bool operator==(const DepthGrid&, const DepthGrid&) = default;
};

// Checks every Episode invariant; throws ValidationError naming the frame.
// Sets `embodiment` from the arm count of the first frame.
void validate_episode(Episode& episode);

// Throws ValidationError if the grid is empty, ragged or non-finite.
void validate_depth_grid(const DepthGrid& grid);

// Reads `<root>/episode.jsonl`. The id is the directory name and the source
// tag is the parent directory name. Referenced image and depth files must
// exist; their contents are not read.
Episode load_episode(const std::filesystem::path& root);

// Writes `<root>/episode.jsonl` for the given frames. Referenced files are the
// caller's responsibility.
void save_episode(const std::filesystem::path& root, const Episode& episode);

// Binary depth file: "ARCD", u32 width, u32 height, u32 zero, then
// width*height little-endian f32 values. When `<path>.json` exists it must
// agree with the header dimensions.
DepthGrid load_depth_grid(const std::filesystem::path& path);

void save_depth_grid(const std::filesystem::path& path, const DepthGrid& grid,
                     bool write_sidecar = true);

}  // namespace ardata
