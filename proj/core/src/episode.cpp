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

#include "ardata/episode.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ardata/error.hpp"
#include "binary_io.hpp"

namespace ardata {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr char kManifestName[] = "episode.jsonl";
constexpr unsigned char kDepthMagic[4] = {'A', 'R', 'C', 'D'};

std::string frame_label(std::size_t pos) { return "frame " + std::to_string(pos); }

Frame frame_from_json(const json& j) {
  Frame f;
  f.index = j.at("index").get<std::uint32_t>();
  f.rgb_refs = j.at("rgb").get<std::vector<std::string>>();
  const auto& depth = j.at("depth");
  if (!depth.is_null()) f.depth_ref = depth.get<std::string>();
  for (const auto& arm : j.at("grippers")) {
    if (!arm.is_array() || arm.size() != 2) throw ParseError("gripper point must be [x, y]");
    f.gripper_points.push_back({arm[0].get<double>(), arm[1].get<double>()});
  }
  f.action = j.at("action").get<std::vector<double>>();
  f.instruction = j.at("instruction").get<std::string>();
  return f;
}

ordered_json frame_to_json(const Frame& f) {
  ordered_json j;
  j["index"] = f.index;
  j["rgb"] = f.rgb_refs;
  j["depth"] = f.depth_ref ? ordered_json(*f.depth_ref) : ordered_json(nullptr);
  auto grippers = ordered_json::array();
  for (const auto& p : f.gripper_points) grippers.push_back({p.x, p.y});
  j["grippers"] = std::move(grippers);
  j["action"] = f.action;
  j["instruction"] = f.instruction;
  return j;
}

void require_file(const fs::path& root, const std::string& ref) {
  const fs::path p = root / ref;
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw IoError("missing referenced file: " + p.string());
}

}  // namespace

const char* to_string(Embodiment e) {
  return e == Embodiment::bimanual ? "bimanual" : "single_arm";
}

void validate_episode(Episode& episode) {
  if (episode.frames.empty()) throw ValidationError("episode " + episode.id + ": no frames");
  const auto& first = episode.frames.front();
  const std::size_t dims = first.action.size();
  const std::size_t arms = first.gripper_points.size();
  if (dims == 0) throw ValidationError(frame_label(0) + ": empty action vector");
  if (arms != 1 && arms != 2) {
    throw ValidationError(frame_label(0) + ": expected 1 or 2 gripper points, found " + std::to_string(arms));
  }
  if (first.index != 0) throw ValidationError(frame_label(0) + ": indices must start at 0");

  for (std::size_t pos = 0; pos < episode.frames.size(); ++pos) {
    const Frame& f = episode.frames[pos];
    if (pos > 0 && f.index <= episode.frames[pos - 1].index) {
      throw ValidationError(frame_label(pos) + ": index " + std::to_string(f.index) + " not strictly increasing");
    }
    if (f.rgb_refs.empty()) throw ValidationError(frame_label(pos) + ": no rgb views");
    if (f.action.size() != dims) {
      throw ValidationError(frame_label(pos) + ": action has " + std::to_string(f.action.size()) +
                            " dims, episode has " + std::to_string(dims));
    }
    for (double a : f.action) {
      if (!std::isfinite(a)) throw ValidationError(frame_label(pos) + ": non-finite action value");
    }
    if (f.gripper_points.size() != arms) {
      throw ValidationError(frame_label(pos) + ": arm count changed mid-episode");
    }
    for (std::size_t arm = 0; arm < arms; ++arm) {
      const auto& p = f.gripper_points[arm];
      const bool ok = p.x >= 0.0 && p.x <= 100.0 && p.y >= 0.0 && p.y <= 100.0;
      if (!ok) {
        std::ostringstream msg;
        msg << frame_label(pos) << " (index " << f.index << "), arm " << arm << ": gripper point (" << p.x << ", "
            << p.y << ") outside [0, 100]";
        throw ValidationError(msg.str());
      }
    }
    if (f.instruction != first.instruction) {
      throw ValidationError(frame_label(pos) + ": instruction changed mid-episode");
    }
  }
  episode.embodiment = arms == 2 ? Embodiment::bimanual : Embodiment::single_arm;
}

void validate_depth_grid(const DepthGrid& grid) {
  if (grid.width == 0 || grid.height == 0) throw ValidationError("depth grid has zero extent");
  if (grid.values.size() != std::size_t{grid.width} * grid.height) {
    throw ValidationError("depth grid holds " + std::to_string(grid.values.size()) + " values, expected " +
                          std::to_string(std::size_t{grid.width} * grid.height));
  }
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    if (!std::isfinite(grid.values[i])) {
      throw ValidationError("non-finite depth value at offset " + std::to_string(i));
    }
  }
}

Episode load_episode(const fs::path& root) {
  const fs::path manifest = root / kManifestName;
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open " + manifest.string());

  Episode episode;
  const fs::path canonical = fs::weakly_canonical(root);
  episode.root = root;
  episode.id = canonical.filename().string();
  episode.source = canonical.parent_path().filename().string();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      episode.frames.push_back(frame_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(manifest.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(manifest.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate_episode(episode);

  for (const auto& f : episode.frames) {
    for (const auto& ref : f.rgb_refs) require_file(root, ref);
    if (f.depth_ref) require_file(root, *f.depth_ref);
  }
  return episode;
}

void save_episode(const fs::path& root, const Episode& episode) {
  std::string text;
  for (const auto& f : episode.frames) {
    text += frame_to_json(f).dump();
    text += '\n';
  }
  detail::write_text(root / kManifestName, text);
}

DepthGrid load_depth_grid(const fs::path& path) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kDepthMagic, 4) != 0) {
    throw FormatError(path.string() + ": not a depth grid (bad magic)");
  }
  DepthGrid grid;
  grid.width = detail::load_le<std::uint32_t>(bytes.data() + 4);
  grid.height = detail::load_le<std::uint32_t>(bytes.data() + 8);
  if (detail::load_le<std::uint32_t>(bytes.data() + 12) != 0) {
    throw FormatError(path.string() + ": reserved header field is not zero");
  }

  fs::path sidecar = path;
  sidecar += ".json";
  if (fs::exists(sidecar)) {
    json meta;
    try {
      meta = json::parse(detail::read_text(sidecar));
    } catch (const json::exception& e) {
      throw ParseError(sidecar.string() + ": " + e.what());
    }
    const auto w = meta.at("width").get<std::uint32_t>();
    const auto h = meta.at("height").get<std::uint32_t>();
    if (w != grid.width || h != grid.height) {
      throw FormatError(path.string() + ": sidecar says " + std::to_string(w) + "x" + std::to_string(h) +
                        ", header says " + std::to_string(grid.width) + "x" + std::to_string(grid.height));
    }
  }

  const std::size_t expected = std::size_t{grid.width} * grid.height;
  const std::size_t payload = bytes.size() - 16;
  if (payload % 4 != 0 || payload / 4 != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) + " floats, payload has " +
                      std::to_string(payload / 4) + (payload % 4 ? " (plus trailing bytes)" : ""));
  }
  grid.values.resize(expected);
  for (std::size_t i = 0; i < expected; ++i) grid.values[i] = detail::load_le<float>(bytes.data() + 16 + 4 * i);
  validate_depth_grid(grid);
  return grid;
}

void save_depth_grid(const fs::path& path, const DepthGrid& grid, bool write_sidecar) {
  std::vector<unsigned char> bytes(kDepthMagic, kDepthMagic + 4);
  bytes.reserve(16 + 4 * grid.values.size());
  detail::append_le<std::uint32_t>(bytes, grid.width);
  detail::append_le<std::uint32_t>(bytes, grid.height);
  detail::append_le<std::uint32_t>(bytes, 0);
  for (float v : grid.values) detail::append_le<float>(bytes, v);
  detail::write_file(path, bytes);
  if (write_sidecar) {
    fs::path sidecar = path;
    sidecar += ".json";
    ordered_json meta;
    meta["width"] = grid.width;
    meta["height"] = grid.height;
    detail::write_text(sidecar, meta.dump() + "\n");
  }
}

}  // namespace ardata
