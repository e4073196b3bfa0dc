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

// End-to-end conversion of episode directories into training streams, and
// the helpers behind each command-line subcommand.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ardata/action_codec.hpp"
#include "ardata/chain.hpp"
#include "ardata/depth_codec.hpp"
#include "ardata/episode.hpp"
#include "ardata/image.hpp"
#include "ardata/overlay.hpp"

namespace ardata {

// Expands inputs into episode directories. An input that holds
// `episode.jsonl` is an episode; otherwise its immediate subdirectories that
// do are taken in name order.
std::vector<std::filesystem::path> discover_episodes(const std::vector<std::filesystem::path>& inputs);

struct FixtureOptions {
  std::size_t episodes = 10;
  std::size_t frames = 30;
  std::uint64_t seed = 7;
  bool bimanual = false;
  std::uint32_t image_edge = 64;
  std::uint32_t depth_width = 64;
  std::uint32_t depth_height = 48;
};

// Writes a synthetic corpus: `<root>/episode_NNN/` each with episode.jsonl,
// side-view and wrist-view PNGs and depth grids. Gripper tracks come from a
// scripted pointer that moves between random waypoints. Returns the episode
// directories.
std::vector<std::filesystem::path> generate_fixture(const std::filesystem::path& root, const FixtureOptions& options);

// (x / (w-1) + y / (h-1)) / 2: 0 at the top-left corner, 1 at the bottom-right.
DepthGrid make_ramp_grid(std::uint32_t width, std::uint32_t height);

ActionQuantileStats fit_stats(const std::vector<std::filesystem::path>& episode_dirs);

DepthCodebook train_codebook_from_episodes(const std::vector<std::filesystem::path>& episode_dirs,
                                           const CodebookTrainingOptions& options);

struct PipelineManifest {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_root;
  std::filesystem::path stats_path;
  std::filesystem::path codebook_path;
  std::optional<std::filesystem::path> vocab_path;
  std::size_t chunk_size = 1;
  std::vector<SampleKind> kinds{std::begin(kAllSampleKinds), std::end(kAllSampleKinds)};
  bool strict = false;
  std::size_t shard_size = 10000;
  Rgb left_color = kTraceYellow;
  Rgb right_color = kTraceCyan;
};

void validate_manifest(const PipelineManifest& manifest);

struct ConvertReport {
  std::size_t episodes = 0;
  std::size_t frames = 0;
  std::size_t skipped_frames = 0;
  std::size_t skipped_episodes = 0;
  std::size_t overlays = 0;
  std::map<SampleKind, std::size_t> emitted;
  std::map<SampleKind, std::size_t> verified;
  std::vector<std::filesystem::path> shards;
};

// Emits one sample per enabled kind for every valid frame, in (episode,
// frame) order, then re-reads every shard and re-parses every target under
// its kind's grammar. With `strict`, the first bad frame aborts; otherwise it
// is logged and skipped.
ConvertReport run_convert(const PipelineManifest& manifest, std::ostream& log);

std::string shard_name(SampleKind kind, std::size_t shard);

struct DatasetStats {
  std::size_t episodes = 0;
  std::size_t frames = 0;
  double mean_episode_length = 0.0;
  // Descending count, ties by verb.
  std::vector<std::pair<std::string, std::size_t>> verbs;
};

// First whitespace-delimited token, ASCII-lowercased; "<none>" if empty.
std::string leading_verb(std::string_view instruction);

DatasetStats compute_dataset_stats(const std::vector<std::string>& instructions, std::size_t frames);
DatasetStats compute_dataset_stats(const std::vector<Episode>& episodes);
std::string dataset_stats_to_json(const DatasetStats& stats);

struct SteerOutputs {
  std::filesystem::path overlay_path;
  std::filesystem::path request_path;
};

// Draws the sketch onto the image and writes `<out>/steer.png` plus
// `<out>/request.json`.
SteerOutputs run_steer(const std::filesystem::path& image, const VisualTrace& trace, const std::string& instruction,
                       const std::filesystem::path& out_dir, Rgb color = kTraceYellow);

}  // namespace ardata
