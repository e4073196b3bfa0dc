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

#include "ardata/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "ardata/error.hpp"
#include "ardata/rng.hpp"
#include "ardata/trace.hpp"
#include "binary_io.hpp"

namespace ardata {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr char kManifestName[] = "episode.jsonl";

constexpr const char* kFixtureInstructions[] = {
    "Put the bowl on the plate",   "pick up the red cup",          "close the top drawer",
    "open the top drawer",         "put the spoon in the pot",     "move the sponge to the left",
    "push the blue block forward", "wipe the table with the towel", "stack the green cube on the red cube",
    "Pick up the banana",
};

std::string frame_file(const char* prefix, std::size_t f, const char* ext) {
  std::string digits = std::to_string(f);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return std::string(prefix) + digits + ext;
}

struct Waypoints {
  GripperPoint start, mid, goal;

  GripperPoint at(double s) const {
    auto lerp = [](GripperPoint a, GripperPoint b, double w) {
      return GripperPoint{a.x + (b.x - a.x) * w, a.y + (b.y - a.y) * w};
    };
    return s < 0.5 ? lerp(start, mid, s * 2.0) : lerp(mid, goal, (s - 0.5) * 2.0);
  }
};

Waypoints random_waypoints(Rng& rng) {
  auto pick = [&] { return GripperPoint{rng.uniform(10.0, 90.0), rng.uniform(10.0, 90.0)}; };
  const auto a = pick();
  const auto b = pick();
  const auto c = pick();
  return {a, b, c};
}

RgbImage side_view(std::uint32_t edge, const std::vector<GripperPoint>& grippers, double hue) {
  RgbImage img(edge, edge);
  for (std::uint32_t y = 0; y < edge; ++y) {
    for (std::uint32_t x = 0; x < edge; ++x) {
      img.set(x, y,
              {static_cast<std::uint8_t>(40 + (x * 120) / edge), static_cast<std::uint8_t>(60 + (y * 100) / edge),
               static_cast<std::uint8_t>(60 + 80 * hue)});
    }
  }
  for (const auto& g : grippers) {
    const int cx = static_cast<int>(std::lround(g.x * (edge - 1) / 100.0));
    const int cy = static_cast<int>(std::lround(g.y * (edge - 1) / 100.0));
    for (int y = cy - 2; y <= cy + 2; ++y) {
      for (int x = cx - 2; x <= cx + 2; ++x) {
        if (x >= 0 && y >= 0 && x < static_cast<int>(edge) && y < static_cast<int>(edge)) {
          img.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), {200, 200, 200});
        }
      }
    }
  }
  return img;
}

DepthGrid scene_depth(const FixtureOptions& o, double slope_x, double slope_y, double offset,
                      const std::vector<GripperPoint>& grippers) {
  DepthGrid grid{o.depth_width, o.depth_height, std::vector<float>(std::size_t{o.depth_width} * o.depth_height)};
  constexpr double sigma = 4.0;
  for (std::uint32_t y = 0; y < o.depth_height; ++y) {
    for (std::uint32_t x = 0; x < o.depth_width; ++x) {
      double v = offset + slope_x * x / (o.depth_width - 1) + slope_y * y / (o.depth_height - 1);
      for (const auto& g : grippers) {
        const double gx = g.x * (o.depth_width - 1) / 100.0;
        const double gy = g.y * (o.depth_height - 1) / 100.0;
        const double d2 = (x - gx) * (x - gx) + (y - gy) * (y - gy);
        v -= 0.6 * std::exp(-d2 / (2.0 * sigma * sigma));
      }
      grid.values[std::size_t{y} * o.depth_width + x] = static_cast<float>(v);
    }
  }
  return grid;
}

}  // namespace

std::vector<fs::path> discover_episodes(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& input : inputs) {
    std::error_code ec;
    if (fs::is_regular_file(input / kManifestName, ec)) {
      out.push_back(input);
      continue;
    }
    if (!fs::is_directory(input, ec)) continue;
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_directory() && fs::is_regular_file(entry.path() / kManifestName, ec)) {
        children.push_back(entry.path());
      }
    }
    std::sort(children.begin(), children.end());
    out.insert(out.end(), children.begin(), children.end());
  }
  return out;
}

DepthGrid make_ramp_grid(std::uint32_t width, std::uint32_t height) {
  DepthGrid grid{width, height, std::vector<float>(std::size_t{width} * height)};
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const double fx = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
      const double fy = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
      grid.values[std::size_t{y} * width + x] = static_cast<float>((fx + fy) / 2.0);
    }
  }
  return grid;
}

std::vector<fs::path> generate_fixture(const fs::path& root, const FixtureOptions& o) {
  if (o.episodes == 0 || o.frames == 0) throw ValidationError("fixture needs at least one episode and frame");
  std::vector<fs::path> dirs;
  const std::size_t arms = o.bimanual ? 2 : 1;
  for (std::size_t i = 0; i < o.episodes; ++i) {
    Rng rng(o.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
    std::string name = std::to_string(i);
    if (name.size() < 3) name.insert(0, 3 - name.size(), '0');
    const fs::path dir = root / ("episode_" + name);
    dirs.push_back(dir);

    std::vector<Waypoints> paths;
    for (std::size_t a = 0; a < arms; ++a) paths.push_back(random_waypoints(rng));
    const double slope_x = rng.uniform(0.2, 1.0);
    const double slope_y = rng.uniform(0.2, 1.0);
    const double offset = rng.uniform(0.5, 2.0);
    const double hue = rng.uniform();

    Episode episode;
    episode.id = dir.filename().string();
    const std::string instruction = kFixtureInstructions[i % std::size(kFixtureInstructions)];
    auto position = [&](std::size_t arm, std::size_t f) {
      const double s = o.frames > 1 ? static_cast<double>(f) / (o.frames - 1) : 0.0;
      return paths[arm].at(s);
    };

    for (std::size_t f = 0; f < o.frames; ++f) {
      Frame frame;
      frame.index = static_cast<std::uint32_t>(f);
      frame.instruction = instruction;
      for (std::size_t a = 0; a < arms; ++a) {
        const GripperPoint p = position(a, f);
        frame.gripper_points.push_back(p);
        const GripperPoint next = position(a, std::min(f + 1, o.frames - 1));
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(f) / o.frames;
        frame.action.push_back((next.x - p.x) / 100.0);
        frame.action.push_back((next.y - p.y) / 100.0);
        frame.action.push_back(0.02 * std::sin(phase));
        frame.action.push_back(rng.uniform(-0.05, 0.05));
        frame.action.push_back(rng.uniform(-0.05, 0.05));
        frame.action.push_back(rng.uniform(-0.1, 0.1));
        frame.action.push_back(f < o.frames / 2 ? 1.0 : 0.0);
      }
      frame.rgb_refs = {frame_file("rgb/side_", f, ".png"), frame_file("rgb/wrist_", f, ".png")};
      frame.depth_ref = frame_file("depth/side_", f, ".depth");

      write_png(dir / frame.rgb_refs[0], side_view(o.image_edge, frame.gripper_points, hue));
      const auto shade = static_cast<std::uint8_t>(30 + (200 * f) / o.frames);
      write_png(dir / frame.rgb_refs[1], RgbImage(o.image_edge / 2, o.image_edge / 2, {shade, shade, 90}));
      save_depth_grid(dir / *frame.depth_ref, scene_depth(o, slope_x, slope_y, offset, frame.gripper_points));
      episode.frames.push_back(std::move(frame));
    }
    validate_episode(episode);
    save_episode(dir, episode);
  }
  return dirs;
}

ActionQuantileStats fit_stats(const std::vector<fs::path>& episode_dirs) {
  if (episode_dirs.empty()) throw ValidationError("no episodes");
  QuantileFitter fitter;
  for (const auto& dir : episode_dirs) fitter.add_episode(load_episode(dir));
  return fitter.finish();
}

DepthCodebook train_codebook_from_episodes(const std::vector<fs::path>& episode_dirs,
                                           const CodebookTrainingOptions& options) {
  if (episode_dirs.empty()) throw ValidationError("no episodes");
  CodebookTrainer trainer(options);
  for (const auto& dir : episode_dirs) {
    const Episode ep = load_episode(dir);
    for (const auto& f : ep.frames) {
      if (f.depth_ref) trainer.add(load_depth_grid(ep.root / *f.depth_ref));
    }
  }
  return trainer.train();
}

void validate_manifest(const PipelineManifest& m) {
  if (m.chunk_size < 1) throw ConfigError("chunk_size must be at least 1");
  if (m.shard_size < 1) throw ConfigError("shard_size must be at least 1");
  if (m.kinds.empty()) throw ConfigError("no sample kinds enabled");
  if (m.output_root.empty()) throw ConfigError("no output root");
  for (const auto* p : {&m.stats_path, &m.codebook_path}) {
    std::error_code ec;
    if (!fs::is_regular_file(*p, ec)) throw IoError("missing input: " + p->string());
  }
}

std::string shard_name(SampleKind kind, std::size_t shard) {
  std::string digits = std::to_string(shard);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return std::string(to_string(kind)) + "-" + digits + ".jsonl";
}

namespace {

// Appends records to `<root>/<kind>-NNNNN.jsonl`, rolling over every
// `shard_size` records.
class ShardWriter {
 public:
  ShardWriter(fs::path root, SampleKind kind, std::size_t shard_size)
      : root_(std::move(root)), kind_(kind), shard_size_(shard_size) {}

  void write(const std::string& line) {
    if (count_ % shard_size_ == 0) open(count_ / shard_size_);
    out_ << line << '\n';
    if (!out_) throw IoError("write failed: " + paths_.back().string());
    ++count_;
  }

  std::size_t count() const { return count_; }
  const std::vector<fs::path>& paths() const { return paths_; }

  void close() {
    if (out_.is_open()) out_.close();
  }

 private:
  void open(std::size_t shard) {
    close();
    paths_.push_back(root_ / shard_name(kind_, shard));
    out_.open(paths_.back(), std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open for writing: " + paths_.back().string());
  }

  fs::path root_;
  SampleKind kind_;
  std::size_t shard_size_;
  std::size_t count_ = 0;
  std::vector<fs::path> paths_;
  std::ofstream out_;
};

void remove_stale_shards(const fs::path& root, SampleKind kind) {
  const std::string prefix = std::string(to_string(kind)) + "-";
  std::vector<fs::path> stale;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with(prefix) && name.ends_with(".jsonl")) stale.push_back(entry.path());
  }
  for (const auto& p : stale) fs::remove(p);
}

std::string overlay_ref(const Episode& ep, const Frame& f) {
  std::string digits = std::to_string(f.index);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "overlays/" + ep.id + "/" + digits + ".png";
}

bool wants(const PipelineManifest& m, SampleKind kind) {
  return std::find(m.kinds.begin(), m.kinds.end(), kind) != m.kinds.end();
}

}  // namespace

ConvertReport run_convert(const PipelineManifest& manifest, std::ostream& log) {
  validate_manifest(manifest);
  const auto episode_dirs = discover_episodes(manifest.inputs);
  if (episode_dirs.empty()) throw ValidationError("no episodes");

  const ActionQuantileStats stats = load_stats(manifest.stats_path);
  const DepthCodebook book = load_codebook(manifest.codebook_path);
  const ChainCodec codec(manifest.vocab_path ? ActionVocabulary::load(*manifest.vocab_path)
                                             : ActionVocabulary::load_default());

  fs::create_directories(manifest.output_root);
  std::vector<SampleKind> kinds;
  for (auto kind : kAllSampleKinds) {
    if (wants(manifest, kind)) kinds.push_back(kind);
  }
  std::map<SampleKind, ShardWriter> writers;
  for (auto kind : kinds) {
    remove_stale_shards(manifest.output_root, kind);
    writers.emplace(kind, ShardWriter(manifest.output_root, kind, manifest.shard_size));
  }
  const bool need_depth = wants(manifest, SampleKind::action_reasoning) || wants(manifest, SampleKind::aux_depth);
  const bool need_overlay = wants(manifest, SampleKind::traj_conditioned);

  ConvertReport report;
  for (const auto& dir : episode_dirs) {
    Episode ep;
    try {
      ep = load_episode(dir);
      if (ep.action_dims() != stats.dims()) {
        throw ValidationError("episode " + ep.id + " has " + std::to_string(ep.action_dims()) +
                              " action dims, stats have " + std::to_string(stats.dims()));
      }
    } catch (const Error& e) {
      if (manifest.strict) throw;
      log << "skipping episode " << dir.string() << ": " << e.what() << '\n';
      ++report.skipped_episodes;
      continue;
    }
    ++report.episodes;

    for (std::size_t t = 0; t < ep.size(); ++t) {
      const Frame& frame = ep.frames[t];
      std::vector<std::pair<SampleKind, std::string>> records;
      try {
        ChainParts parts;
        parts.traces = episode_traces(ep, t);
        parts.actions = chunk_actions(ep, t, stats, manifest.chunk_size);
        if (need_depth) {
          if (!frame.depth_ref) throw ValidationError("frame " + std::to_string(frame.index) + " has no depth grid");
          parts.depth = encode_depth(load_depth_grid(ep.root / *frame.depth_ref), book);
        }

        FrameContext context;
        context.instruction = frame.instruction;
        context.bimanual = ep.embodiment == Embodiment::bimanual;
        for (const auto& ref : frame.rgb_refs) context.image_refs.push_back((ep.root / ref).lexically_normal().string());

        if (need_overlay) {
          const RgbImage primary = read_png(ep.root / frame.rgb_refs.front());
          const RgbImage overlaid =
              parts.traces.size() == 2
                  ? overlay_bimanual(primary, parts.traces[0], parts.traces[1], manifest.left_color,
                                     manifest.right_color)
                  : overlay_trace(primary, parts.traces[0], manifest.left_color);
          const std::string ref = overlay_ref(ep, frame);
          write_png(manifest.output_root / ref, overlaid);
          ++report.overlays;
          context.overlay_ref = ref;
        }
        for (auto kind : kinds) records.emplace_back(kind, sample_to_json(make_sample(codec, kind, context, parts)));
      } catch (const Error& e) {
        if (manifest.strict) throw;
        log << "skipping " << ep.id << " frame " << frame.index << ": " << e.what() << '\n';
        ++report.skipped_frames;
        continue;
      }
      for (const auto& [kind, line] : records) writers.at(kind).write(line);
      ++report.frames;
    }
  }

  for (auto& [kind, writer] : writers) {
    writer.close();
    report.emitted[kind] = writer.count();
    report.shards.insert(report.shards.end(), writer.paths().begin(), writer.paths().end());
  }

  // Verification pass over what actually landed on disk.
  for (auto& [kind, writer] : writers) {
    std::size_t verified = 0;
    for (const auto& shard : writer.paths()) {
      std::ifstream in(shard);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        try {
          const ReasoningSample sample = sample_from_json(line);
          if (sample.kind != kind || !sample.target) throw ValidationError("wrong kind or missing target");
          codec.parse_target(kind, *sample.target);
        } catch (const Error& e) {
          throw Error("verification failed at " + shard.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        ++verified;
      }
    }
    report.verified[kind] = verified;
    if (verified != writer.count()) {
      throw Error(std::string("verification found ") + std::to_string(verified) + " " + to_string(kind) +
                  " records, wrote " + std::to_string(writer.count()));
    }
  }
  return report;
}

std::string leading_verb(std::string_view instruction) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  auto begin = std::find_if_not(instruction.begin(), instruction.end(), is_space);
  auto end = std::find_if(begin, instruction.end(), is_space);
  if (begin == end) return "<none>";
  std::string verb(begin, end);
  for (auto& c : verb) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return verb;
}

DatasetStats compute_dataset_stats(const std::vector<std::string>& instructions, std::size_t frames) {
  DatasetStats stats;
  stats.episodes = instructions.size();
  stats.frames = frames;
  stats.mean_episode_length = instructions.empty() ? 0.0 : static_cast<double>(frames) / instructions.size();
  std::map<std::string, std::size_t> counts;
  for (const auto& s : instructions) ++counts[leading_verb(s)];
  stats.verbs.assign(counts.begin(), counts.end());
  std::stable_sort(stats.verbs.begin(), stats.verbs.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return stats;
}

DatasetStats compute_dataset_stats(const std::vector<Episode>& episodes) {
  std::vector<std::string> instructions;
  std::size_t frames = 0;
  for (const auto& ep : episodes) {
    instructions.push_back(ep.frames.empty() ? std::string() : ep.instruction());
    frames += ep.size();
  }
  return compute_dataset_stats(instructions, frames);
}

std::string dataset_stats_to_json(const DatasetStats& stats) {
  ordered_json j;
  j["episodes"] = stats.episodes;
  j["frames"] = stats.frames;
  j["mean_episode_length"] = stats.mean_episode_length;
  auto verbs = ordered_json::array();
  for (const auto& [verb, count] : stats.verbs) verbs.push_back({{"verb", verb}, {"count", count}});
  j["verbs"] = std::move(verbs);
  return j.dump(2) + "\n";
}

SteerOutputs run_steer(const fs::path& image, const VisualTrace& trace, const std::string& instruction,
                       const fs::path& out_dir, Rgb color) {
  validate_trace(trace);
  const RgbImage input = read_png(image);
  SteerOutputs out{out_dir / "steer.png", out_dir / "request.json"};
  write_png(out.overlay_path, overlay_trace(input, trace, color));
  const SteeringRequest request = make_steering_request(out.overlay_path.string(), instruction, trace);
  detail::write_text(out.request_path, steering_request_to_json(request) + "\n");
  return out;
}

}  // namespace ardata
