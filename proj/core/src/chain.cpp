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

#include "ardata/chain.hpp"

#include <array>
#include <charconv>

#include <json.hpp>

namespace ardata {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string stage_prefix(ChainStage stage) {
  switch (stage) {
    case ChainStage::depth:
      return "depth stage: ";
    case ChainStage::trace:
      return "trace stage: ";
    case ChainStage::action:
      return "action stage: ";
    case ChainStage::order:
      break;
  }
  return "stage order violation: ";
}

struct StagesOf {
  bool depth;
  bool trace;
  bool action;
};

StagesOf stages_of(SampleKind kind) {
  switch (kind) {
    case SampleKind::action_reasoning:
      return {true, true, true};
    case SampleKind::aux_depth:
      return {true, false, false};
    case SampleKind::aux_trace:
      return {false, true, false};
    case SampleKind::traj_conditioned:
      break;
  }
  return {false, false, true};
}

// Which stage marker, if any, starts `rest`.
std::optional<ChainStage> stage_at(std::string_view rest) {
  if (rest.starts_with(DepthVocabulary::start)) return ChainStage::depth;
  if (rest.starts_with(kTraceMarker) || rest.starts_with(kTraceLeftMarker) || rest.starts_with(kTraceRightMarker)) {
    return ChainStage::trace;
  }
  if (rest.starts_with(kActionMarker)) return ChainStage::action;
  return std::nullopt;
}

// Cursor over the point-list syntax. Throws trace-stage errors.
class TraceReader {
 public:
  TraceReader(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  std::size_t pos() const { return pos_; }

  VisualTrace read(Arm arm) {
    VisualTrace trace{.points = {}, .arm = arm};
    expect('[');
    while (true) {
      expect('[');
      const int u = integer();
      expect(',');
      const int v = integer();
      expect(']');
      trace.points.push_back({u, v});
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      break;
    }
    if (trace.points.size() > kMaxTracePoints) {
      throw ChainParseError(ChainStage::trace,
                            "trace length " + std::to_string(trace.points.size()) + " exceeds 5 points");
    }
    return trace;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ChainParseError(ChainStage::trace, what + " at byte " + std::to_string(base_ + pos_));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  int integer() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    const std::string_view digits = text_.substr(start, pos_ - start);
    if (digits.empty()) fail("expected coordinate");
    if (digits.size() > 1 && digits[0] == '0') fail("zero-padded coordinate");
    int value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || value > 255) fail("coordinate outside [0, 255]");
    return value;
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Splits the action section into tokens. `base` is the byte offset of the
// section body in the full text.
ActionTokenSeq parse_action_body(std::string_view body, std::size_t base, const ActionVocabulary& vocab) {
  for (auto marker : {DepthVocabulary::start, kTraceMarker, kTraceLeftMarker, kActionMarker}) {
    if (const auto at = body.find(marker); at != std::string_view::npos) {
      throw ChainParseError(ChainStage::order, "stage marker after the action stage at byte " +
                                                   std::to_string(base + at));
    }
  }
  if (body.empty()) throw ChainParseError(ChainStage::action, "empty action stage at byte " + std::to_string(base));
  ActionTokenSeq out;
  std::size_t start = 0;
  while (true) {
    const auto space = body.find(' ', start);
    const std::string_view token = body.substr(start, space == std::string_view::npos ? space : space - start);
    if (token.empty()) {
      throw ChainParseError(ChainStage::action, "empty action token at byte " + std::to_string(base + start));
    }
    const int bin = vocab.bin(token);
    if (bin < 0) {
      throw ChainParseError(ChainStage::action, "action vocabulary: unknown token at position " +
                                                    std::to_string(out.size()) + " (byte " +
                                                    std::to_string(base + start) + ")");
    }
    out.push_back(static_cast<std::uint8_t>(bin));
    if (space == std::string_view::npos) break;
    start = space + 1;
  }
  return out;
}

}  // namespace

const char* to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::action_reasoning:
      return "action_reasoning";
    case SampleKind::aux_depth:
      return "aux_depth";
    case SampleKind::aux_trace:
      return "aux_trace";
    case SampleKind::traj_conditioned:
      break;
  }
  return "traj_conditioned";
}

SampleKind parse_sample_kind(std::string_view name) {
  for (auto kind : kAllSampleKinds) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown sample kind '" + std::string(name) + "'");
}

const char* to_string(ChainStage stage) {
  switch (stage) {
    case ChainStage::depth:
      return "depth";
    case ChainStage::trace:
      return "trace";
    case ChainStage::action:
      return "action";
    case ChainStage::order:
      break;
  }
  return "order";
}

ChainParseError::ChainParseError(ChainStage stage, const std::string& what)
    : ParseError(stage_prefix(stage) + what), stage_(stage) {}

std::string format_trace_points(const VisualTrace& trace) {
  std::string out = "[";
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    if (i) out += ',';
    out += '[' + std::to_string(trace.points[i].u) + ',' + std::to_string(trace.points[i].v) + ']';
  }
  out += ']';
  return out;
}

VisualTrace parse_trace_points(std::string_view text) {
  TraceReader reader(text, 0);
  VisualTrace trace = reader.read(Arm::single);
  if (reader.pos() != text.size()) {
    throw ChainParseError(ChainStage::trace, "trailing text at byte " + std::to_string(reader.pos()));
  }
  return trace;
}

std::string ChainCodec::render_trace_section(const std::vector<VisualTrace>& traces) const {
  for (const auto& t : traces) validate_trace(t);
  if (traces.size() == 1) return std::string(kTraceMarker) + format_trace_points(traces[0]);
  if (traces.size() == 2) {
    return std::string(kTraceLeftMarker) + format_trace_points(traces[0]) + std::string(kTraceRightMarker) +
           format_trace_points(traces[1]);
  }
  throw ValidationError("a chain carries 1 or 2 traces, got " + std::to_string(traces.size()));
}

std::string ChainCodec::render_action_section(const ActionTokenSeq& actions) const {
  if (actions.empty()) throw ValidationError("empty action sequence");
  std::string out(kActionMarker);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out += ' ';
    out += vocab_.token(actions[i]);
  }
  return out;
}

std::string ChainCodec::render_parts(const ChainParts& parts) const {
  std::string out;
  if (parts.depth) out += render_depth_string(*parts.depth);
  if (!parts.traces.empty()) out += render_trace_section(parts.traces);
  if (parts.actions) out += render_action_section(*parts.actions);
  return out;
}

std::string ChainCodec::render_chain(const ReasoningChain& chain) const {
  ChainParts parts{.depth = chain.depth, .traces = chain.traces, .actions = chain.actions};
  if (chain.traces.empty()) throw ValidationError("chain has no trace");
  return render_parts(parts);
}

ChainParts ChainCodec::parse_parts(std::string_view text) const {
  ChainParts parts;
  std::optional<ChainStage> last;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::string_view rest = text.substr(pos);
    const auto stage = stage_at(rest);
    if (!stage) {
      const ChainStage where = last.value_or(ChainStage::depth);
      throw ChainParseError(where, "unexpected text at byte " + std::to_string(pos));
    }
    if (last && *stage <= *last) {
      throw ChainParseError(ChainStage::order, std::string(to_string(*stage)) + " stage after " + to_string(*last) +
                                                   " stage at byte " + std::to_string(pos));
    }
    switch (*stage) {
      case ChainStage::depth: {
        std::size_t consumed = 0;
        try {
          parts.depth = parse_depth_string(rest, &consumed);
        } catch (const ParseError& e) {
          throw ChainParseError(ChainStage::depth, e.what());
        }
        pos += consumed;
        break;
      }
      case ChainStage::trace: {
        if (rest.starts_with(kTraceMarker)) {
          TraceReader reader(rest.substr(kTraceMarker.size()), pos + kTraceMarker.size());
          parts.traces.push_back(reader.read(Arm::single));
          pos += kTraceMarker.size() + reader.pos();
        } else if (rest.starts_with(kTraceLeftMarker)) {
          TraceReader left(rest.substr(kTraceLeftMarker.size()), pos + kTraceLeftMarker.size());
          parts.traces.push_back(left.read(Arm::left));
          pos += kTraceLeftMarker.size() + left.pos();
          if (!text.substr(pos).starts_with(kTraceRightMarker)) {
            throw ChainParseError(ChainStage::trace, "missing ;TRACE_R= at byte " + std::to_string(pos));
          }
          TraceReader right(text.substr(pos + kTraceRightMarker.size()), pos + kTraceRightMarker.size());
          parts.traces.push_back(right.read(Arm::right));
          pos += kTraceRightMarker.size() + right.pos();
        } else {
          throw ChainParseError(ChainStage::trace, ";TRACE_R= without ;TRACE_L= at byte " + std::to_string(pos));
        }
        break;
      }
      case ChainStage::action: {
        const std::size_t body = pos + kActionMarker.size();
        parts.actions = parse_action_body(text.substr(body), body, vocab_);
        pos = text.size();
        break;
      }
      case ChainStage::order:
        break;
    }
    last = stage;
  }
  return parts;
}

ReasoningChain ChainCodec::parse_chain(std::string_view text) const {
  ChainParts parts = parse_target(SampleKind::action_reasoning, text);
  return {std::move(*parts.depth), std::move(parts.traces), std::move(*parts.actions)};
}

std::string ChainCodec::render_target(SampleKind kind, const ChainParts& parts) const {
  const StagesOf want = stages_of(kind);
  ChainParts selected;
  if (want.depth) {
    if (!parts.depth) throw ValidationError(std::string(to_string(kind)) + " sample needs depth tokens");
    selected.depth = parts.depth;
  }
  if (want.trace) {
    if (parts.traces.empty()) throw ValidationError(std::string(to_string(kind)) + " sample needs a trace");
    selected.traces = parts.traces;
  }
  if (want.action) {
    if (!parts.actions) throw ValidationError(std::string(to_string(kind)) + " sample needs action tokens");
    selected.actions = parts.actions;
  }
  return render_parts(selected);
}

ChainParts ChainCodec::parse_target(SampleKind kind, std::string_view text) const {
  ChainParts parts = parse_parts(text);
  const StagesOf want = stages_of(kind);
  const std::string label = to_string(kind);
  auto check = [&](bool wanted, bool present, ChainStage stage) {
    if (wanted && !present) throw ChainParseError(stage, "missing from " + label + " target");
    if (!wanted && present) throw ChainParseError(stage, "not allowed in " + label + " target");
  };
  check(want.depth, parts.depth.has_value(), ChainStage::depth);
  check(want.trace, !parts.traces.empty(), ChainStage::trace);
  check(want.action, parts.actions.has_value(), ChainStage::action);
  return parts;
}

std::string sample_prompt(SampleKind kind, std::string_view instruction, bool bimanual) {
  const std::string task = instruction.empty() ? std::string() : "The task is \"" + std::string(instruction) + "\". ";
  switch (kind) {
    case SampleKind::action_reasoning:
      return task +
             "What action should the robot take? Think step by step: predict the depth perception tokens, then "
             "the visual reasoning trace, then the action tokens.";
    case SampleKind::aux_depth:
      return "Predict the depth perception tokens of the image.";
    case SampleKind::aux_trace:
      return task + (bimanual ? "Predict the visual reasoning traces of the left and right robot grippers."
                              : "Predict the visual reasoning trace of the robot gripper.");
    case SampleKind::traj_conditioned:
      break;
  }
  return task + "Follow the trajectory drawn on the image. What action should the robot take?";
}

ReasoningSample make_sample(const ChainCodec& codec, SampleKind kind, const FrameContext& context,
                            const ChainParts& parts) {
  ReasoningSample sample;
  sample.kind = kind;
  sample.prompt = sample_prompt(kind, context.instruction, context.bimanual);
  if (kind == SampleKind::traj_conditioned) {
    if (!context.overlay_ref) throw ValidationError("traj_conditioned sample needs an overlaid image");
    sample.images.push_back(*context.overlay_ref);
    if (context.image_refs.size() > 1) {
      sample.images.insert(sample.images.end(), context.image_refs.begin() + 1, context.image_refs.end());
    }
  } else {
    sample.images = context.image_refs;
  }
  sample.target = codec.render_target(kind, parts);
  return sample;
}

SteeringRequest make_steering_request(std::string image_ref, std::string instruction, VisualTrace trace) {
  validate_trace(trace);
  SteeringRequest request;
  request.sample.kind = SampleKind::traj_conditioned;
  request.sample.prompt = sample_prompt(SampleKind::traj_conditioned, instruction, false);
  request.sample.images.push_back(std::move(image_ref));
  request.sample.inference = true;
  request.trace = std::move(trace);
  return request;
}

namespace {

ordered_json sample_object(const ReasoningSample& sample) {
  ordered_json j;
  j["kind"] = to_string(sample.kind);
  j["prompt"] = sample.prompt;
  j["images"] = sample.images;
  j["target"] = sample.target ? ordered_json(*sample.target) : ordered_json(nullptr);
  if (sample.inference) j["inference"] = true;
  return j;
}

}  // namespace

std::string sample_to_json(const ReasoningSample& sample) { return sample_object(sample).dump(); }

std::string steering_request_to_json(const SteeringRequest& request) {
  ordered_json j = sample_object(request.sample);
  auto points = ordered_json::array();
  for (const auto& p : request.trace.points) points.push_back({p.u, p.v});
  j["trace"] = std::move(points);
  return j.dump();
}

ReasoningSample sample_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    ReasoningSample sample;
    sample.kind = parse_sample_kind(j.at("kind").get<std::string>());
    sample.prompt = j.at("prompt").get<std::string>();
    sample.images = j.at("images").get<std::vector<std::string>>();
    if (!j.at("target").is_null()) sample.target = j.at("target").get<std::string>();
    sample.inference = j.value("inference", false);
    return sample;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sample record: ") + e.what());
  }
}

}  // namespace ardata
