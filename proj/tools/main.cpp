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

// ardata: converts robot episodes into action reasoning training data.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ardata/action_codec.hpp"
#include "ardata/chain.hpp"
#include "ardata/depth_codec.hpp"
#include "ardata/error.hpp"
#include "ardata/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ardata::Rgb parse_color(const std::string& text) {
  std::istringstream in(text);
  int r = -1, g = -1, b = -1;
  char c1 = 0, c2 = 0;
  in >> r >> c1 >> g >> c2 >> b;
  const bool ok = in && in.peek() == EOF && c1 == ',' && c2 == ',' && r >= 0 && r <= 255 && g >= 0 && g <= 255 &&
                  b >= 0 && b <= 255;
  if (!ok) throw UsageError("--overlay-color expects R,G,B with components in [0, 255]");
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

std::vector<ardata::SampleKind> parse_kinds(const std::string& text) {
  std::vector<ardata::SampleKind> kinds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      kinds.push_back(ardata::parse_sample_kind(item));
    } catch (const ardata::ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (kinds.empty()) throw UsageError("--kinds lists no sample kinds");
  return kinds;
}

std::vector<fs::path> episodes_or_fail(const std::vector<std::string>& inputs) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  auto dirs = ardata::discover_episodes(paths);
  if (dirs.empty()) throw ardata::ValidationError("no episodes");
  return dirs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert robot episodes into action reasoning training data"};
  app.require_subcommand(1);

  std::vector<std::string> inputs;
  std::string stats_out_path = "stats.json";
  std::string codebook_out_path = "depth_codebook.bin";
  std::string out;
  std::string stats_path;
  std::string codebook_path;
  std::string vocab_path;
  std::string kinds = "action_reasoning,aux_depth,aux_trace,traj_conditioned";
  std::string overlay_color;
  std::size_t chunk_size = 1;
  std::size_t shard_size = 10000;
  std::uint64_t seed = 7;
  std::size_t k = ardata::kDepthCodeCount;
  int iterations = 20;
  bool strict = false;

  auto* fit = app.add_subcommand("fit-stats", "Fit per-dimension action quantiles");
  fit->add_option("episodes", inputs, "Episode or corpus directories");
  fit->add_option("--out", stats_out_path, "Output stats.json")->capture_default_str();

  auto* train = app.add_subcommand("train-codebook", "Train the 128-entry depth codebook");
  train->add_option("episodes", inputs, "Episode or corpus directories");
  train->add_option("--out", codebook_out_path, "Output codebook")->capture_default_str();
  train->add_option("--seed", seed, "k-means++ seed")->default_val(7);
  train->add_option("--k", k, "Codebook size")->default_val(ardata::kDepthCodeCount)->check(CLI::Range(1, 128));
  train->add_option("--iterations", iterations, "Maximum Lloyd iterations")->default_val(20)->check(CLI::PositiveNumber);

  auto* convert = app.add_subcommand("convert", "Emit JSONL sample streams and overlay images");
  convert->add_option("episodes", inputs, "Episode or corpus directories");
  convert->add_option("--stats", stats_path, "stats.json from fit-stats")->required();
  convert->add_option("--codebook", codebook_path, "Codebook from train-codebook")->required();
  convert->add_option("--out", out, "Output directory")->required();
  convert->add_option("--chunk-size", chunk_size, "Actions per target (8 for post-training)")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  convert->add_option("--kinds", kinds, "Comma-separated sample kinds")->capture_default_str();
  convert->add_option("--shard-size", shard_size, "Records per JSONL shard")->default_val(10000)->check(CLI::PositiveNumber);
  convert->add_option("--vocab", vocab_path, "Action vocabulary JSON");
  convert->add_option("--overlay-color", overlay_color, "Trace color R,G,B");
  convert->add_flag("--strict", strict, "Abort on the first invalid frame");

  auto* stats = app.add_subcommand("stats", "Report episode counts and the leading-verb distribution");
  stats->add_option("episodes", inputs, "Episode or corpus directories");
  stats->add_option("--out", out, "Write the report here instead of stdout");

  std::string image;
  std::string trace_text;
  std::string instruction;
  auto* steer = app.add_subcommand("steer", "Overlay a user sketch and build a steering request");
  steer->add_option("--image", image, "Observation PNG")->required();
  steer->add_option("--trace", trace_text, "Sketch as [[u,v],...] on the 0..255 grid")->required();
  steer->add_option("--instruction", instruction, "Task instruction (may be empty)");
  steer->add_option("--out", out, "Output directory")->required();
  steer->add_option("--overlay-color", overlay_color, "Trace color R,G,B");

  ardata::FixtureOptions fixture;
  auto* gen = app.add_subcommand("gen-fixture", "Write the synthetic mini10 corpus");
  gen->add_option("--out", out, "Corpus directory")->required();
  gen->add_option("--seed", fixture.seed, "Generator seed")->default_val(7);
  gen->add_option("--episodes", fixture.episodes, "Episode count")->default_val(10)->check(CLI::PositiveNumber);
  gen->add_option("--frames", fixture.frames, "Frames per episode")->default_val(30)->check(CLI::PositiveNumber);
  gen->add_flag("--bimanual", fixture.bimanual, "Two arms per episode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*fit) {
      const auto stats_out = ardata::fit_stats(episodes_or_fail(inputs));
      ardata::save_stats(stats_out_path, stats_out);
      std::cout << "wrote " << stats_out_path << " (dims " << stats_out.dims() << ")\n";
    } else if (*train) {
      const auto dirs = episodes_or_fail(inputs);
      const auto book = ardata::train_codebook_from_episodes(dirs, {.k = k, .max_iterations = iterations, .seed = seed});
      ardata::save_codebook(codebook_out_path, book);
      std::cout << "wrote " << codebook_out_path << " (k " << book.size() << ")\n";
    } else if (*convert) {
      ardata::PipelineManifest manifest;
      manifest.inputs.assign(inputs.begin(), inputs.end());
      manifest.output_root = out;
      manifest.stats_path = stats_path;
      manifest.codebook_path = codebook_path;
      if (!vocab_path.empty()) manifest.vocab_path = vocab_path;
      manifest.chunk_size = chunk_size;
      manifest.shard_size = shard_size;
      manifest.kinds = parse_kinds(kinds);
      manifest.strict = strict;
      if (!overlay_color.empty()) manifest.left_color = parse_color(overlay_color);
      const auto report = ardata::run_convert(manifest, std::cerr);
      std::cout << "episodes " << report.episodes << ", frames " << report.frames << ", skipped frames "
                << report.skipped_frames << ", overlays " << report.overlays << "\n";
      for (const auto& [kind, count] : report.emitted) {
        std::cout << ardata::to_string(kind) << ": " << count << " samples, " << report.verified.at(kind)
                  << " verified\n";
      }
    } else if (*stats) {
      std::vector<ardata::Episode> episodes;
      for (const auto& dir : episodes_or_fail(inputs)) episodes.push_back(ardata::load_episode(dir));
      const std::string report = ardata::dataset_stats_to_json(ardata::compute_dataset_stats(episodes));
      if (out.empty()) {
        std::cout << report;
      } else {
        std::ofstream(out) << report;
      }
    } else if (*steer) {
      ardata::VisualTrace trace;
      try {
        trace = ardata::parse_trace_points(trace_text);
      } catch (const ardata::ChainParseError& e) {
        if (e.stage() == ardata::ChainStage::trace && std::string(e.what()).find("trace length") != std::string::npos) {
          throw UsageError("trace must have 1–5 points");
        }
        throw UsageError(std::string("--trace: ") + e.what());
      }
      const ardata::Rgb color = overlay_color.empty() ? ardata::kTraceYellow : parse_color(overlay_color);
      const auto outputs = ardata::run_steer(image, trace, instruction, out, color);
      std::cout << "wrote " << outputs.overlay_path.string() << " and " << outputs.request_path.string() << "\n";
    } else if (*gen) {
      const auto dirs = ardata::generate_fixture(out, fixture);
      std::cout << "wrote " << dirs.size() << " episodes to " << out << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
