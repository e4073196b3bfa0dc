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

// Text form of reasoning chains and training samples.
//
//   chain   := depth trace action
//   depth   := "<DEPTH_START>" ("<DEPTH_" k ">"){100} "<DEPTH_END>"
//   trace   := ";TRACE=" points | ";TRACE_L=" points ";TRACE_R=" points
//   points  := "[" "[" u "," v "]" ("," "[" u "," v "]"){0,4} "]"
//   action  := ";ACTION=" token (" " token)*
//
// k is 1..128 and u, v are 0..255, all plain decimal without padding.
// Action tokens come from the 256-entry action vocabulary; several entries
// are prefixes of others, hence the space separator. A sample target holds
// the stages of its kind in this order and nothing else.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ardata/action_codec.hpp"
#include "ardata/depth_codec.hpp"
#include "ardata/error.hpp"
#include "ardata/trace.hpp"

namespace ardata {

inline constexpr std::string_view kTraceMarker = ";TRACE=";
inline constexpr std::string_view kTraceLeftMarker = ";TRACE_L=";
inline constexpr std::string_view kTraceRightMarker = ";TRACE_R=";
inline constexpr std::string_view kActionMarker = ";ACTION=";

enum class SampleKind { action_reasoning, aux_depth, aux_trace, traj_conditioned };

inline constexpr SampleKind kAllSampleKinds[] = {SampleKind::action_reasoning, SampleKind::aux_depth,
                                                 SampleKind::aux_trace, SampleKind::traj_conditioned};

const char* to_string(SampleKind kind);
SampleKind parse_sample_kind(std::string_view name);

enum class ChainStage { depth, trace, action, order };

const char* to_string(ChainStage stage);

// Parse failure tagged with the stage that rejected the input. The message
// starts with "depth stage", "trace stage", "action stage" or
// "stage order violation".
class ChainParseError : public ParseError {
 public:
  ChainParseError(ChainStage stage, const std::string& what);
  ChainStage stage() const { return stage_; }

 private:
  ChainStage stage_;
};

struct ReasoningChain {
  DepthTokenString depth;
  std::vector<VisualTrace> traces;  // [single] or [left, right]
  ActionTokenSeq actions;

  friend bool operator==(const ReasoningChain&, const ReasoningChain&) = default;
};

// Any subset of the stages, in chain order.
struct ChainParts {
  std::optional<DepthTokenString> depth;
  std::vector<VisualTrace> traces;
  std::optional<ActionTokenSeq> actions;

  friend bool operator==(const ChainParts&, const ChainParts&) = default;
};

std::string format_trace_points(const VisualTrace& trace);

// Parses "[[u,v],...]" (the whole input). Enforces the 1..5 point bound.
VisualTrace parse_trace_points(std::string_view text);

class ChainCodec {
 public:
  explicit ChainCodec(ActionVocabulary vocab) : vocab_(std::move(vocab)) {}

  const ActionVocabulary& vocabulary() const { return vocab_; }

  std::string render_chain(const ReasoningChain& chain) const;
  ReasoningChain parse_chain(std::string_view text) const;

  // Present stages only, in order.
  std::string render_parts(const ChainParts& parts) const;
  ChainParts parse_parts(std::string_view text) const;

  // Renders exactly the stages of `kind`; throws ValidationError if one is
  // missing from `parts`.
  std::string render_target(SampleKind kind, const ChainParts& parts) const;
  // Parses and requires exactly the stages of `kind`.
  ChainParts parse_target(SampleKind kind, std::string_view text) const;

 private:
  std::string render_trace_section(const std::vector<VisualTrace>& traces) const;
  std::string render_action_section(const ActionTokenSeq& actions) const;

  ActionVocabulary vocab_;
};

struct FrameContext {
  std::string instruction;
  // Primary side view first.
  std::vector<std::string> image_refs;
  // Required for traj_conditioned: primary view with the trace drawn on it.
  std::optional<std::string> overlay_ref;
  bool bimanual = false;
};

struct ReasoningSample {
  SampleKind kind = SampleKind::action_reasoning;
  std::string prompt;
  std::vector<std::string> images;
  std::optional<std::string> target;  // empty for inference requests
  bool inference = false;

  friend bool operator==(const ReasoningSample&, const ReasoningSample&) = default;
};

std::string sample_prompt(SampleKind kind, std::string_view instruction, bool bimanual);

ReasoningSample make_sample(const ChainCodec& codec, SampleKind kind, const FrameContext& context,
                            const ChainParts& parts);

struct SteeringRequest {
  ReasoningSample sample;
  VisualTrace trace;  // the points to draw onto the observation
};

// `image_ref` names the observation the trace is overlaid on.
SteeringRequest make_steering_request(std::string image_ref, std::string instruction, VisualTrace trace);

// One JSONL record: {"kind", "prompt", "images", "target"}; inference
// requests add "inference": true and a null target.
std::string sample_to_json(const ReasoningSample& sample);
std::string steering_request_to_json(const SteeringRequest& request);
ReasoningSample sample_from_json(std::string_view line);

}  // namespace ardata
