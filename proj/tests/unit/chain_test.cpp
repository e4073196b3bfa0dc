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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ardata/rng.hpp"
#include "test_util.hpp"

namespace ardata {
namespace {

constexpr const char* kTok0 = "\xc3\xa2\xc2\xbd\xc4\xb9";
constexpr const char* kTok81 = "\xc3\xb0\xc4\xb8\xc2\xa5\xc2\xa8";
constexpr const char* kTok82 = "\xc3\xb0\xc4\xb8\xc2\xa5";

const ChainCodec& codec() {
  static const ChainCodec c(ActionVocabulary::load_default());
  return c;
}

std::string depth_ones() {
  std::string s = "<DEPTH_START>";
  for (int i = 0; i < 100; ++i) s += "<DEPTH_1>";
  return s + "<DEPTH_END>";
}

ReasoningChain minimal_chain() {
  return {DepthTokenString{std::vector<int>(100, 1)}, {VisualTrace{{{0, 0}}, Arm::single}}, {0}};
}

template <typename F>
ChainStage failing_stage(F&& f) {
  try {
    f();
  } catch (const ChainParseError& e) {
    return e.stage();
  }
  ADD_FAILURE() << "no ChainParseError";
  return ChainStage::order;
}

template <typename F>
std::string failure_message(F&& f) {
  try {
    f();
  } catch (const ChainParseError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ChainParseError";
  return {};
}

TEST(Chain, MinimalGolden) {
  const std::string expected = depth_ones() + ";TRACE=[[0,0]];ACTION=" + kTok0;
  EXPECT_EQ(codec().render_chain(minimal_chain()), expected);
  EXPECT_EQ(codec().parse_chain(expected), minimal_chain());
}

std::string golden(const std::string& name) {
  std::ifstream in(std::filesystem::path(ARDATA_GOLDEN_DIR) / name, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Chain, GoldenFiles) {
  EXPECT_EQ(golden("chain_minimal.txt"), codec().render_chain(minimal_chain()));
  std::vector<int> depth;
  for (int i = 0; i < 100; ++i) depth.push_back(i % 128 + 1);
  const ReasoningChain bi{DepthTokenString{depth},
                          {VisualTrace{{{30, 200}, {90, 150}, {120, 60}}, Arm::left},
                           VisualTrace{{{220, 210}, {160, 120}, {140, 70}, {100, 40}}, Arm::right}},
                          {255, 0, 81, 82, 127}};
  const std::string text = golden("chain_bimanual.txt");
  EXPECT_EQ(text, codec().render_chain(bi));
  EXPECT_EQ(codec().parse_chain(text), bi);
}

TEST(Chain, BimanualUsesLeftRightMarkers) {
  ReasoningChain c = minimal_chain();
  c.traces = {VisualTrace{{{1, 2}, {3, 4}}, Arm::left}, VisualTrace{{{5, 6}}, Arm::right}};
  c.actions = {82, 81, 0};
  const std::string text = codec().render_chain(c);
  EXPECT_EQ(text, depth_ones() + ";TRACE_L=[[1,2],[3,4]];TRACE_R=[[5,6]];ACTION=" + kTok82 + " " + kTok81 + " " +
                      kTok0);
  EXPECT_EQ(codec().parse_chain(text), c);
}

TEST(Chain, PrefixTokensStayDistinct) {
  ReasoningChain c = minimal_chain();
  c.actions = {81, 82, 82, 81};
  EXPECT_EQ(codec().parse_chain(codec().render_chain(c)).actions, c.actions);
}

TEST(Chain, RandomRoundTrip) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const bool bimanual = i % 3 == 0;
    const std::size_t chunk = 1 + rng.below(8);
    const ReasoningChain c = testing::random_chain(rng, bimanual, chunk, bimanual ? 14 : 7);
    const std::string text = codec().render_chain(c);
    ASSERT_EQ(codec().parse_chain(text), c) << text;
    ASSERT_EQ(codec().render_chain(codec().parse_chain(text)), text);
  }
}

TEST(Chain, EditsStayLocal) {
  Rng rng(5);
  const ReasoningChain base = testing::random_chain(rng, false, 2, 7);
  ReasoningChain depth_edit = base;
  depth_edit.depth.indices[40] = depth_edit.depth.indices[40] % 128 + 1;
  ReasoningChain action_edit = base;
  action_edit.actions[3] = static_cast<std::uint8_t>(action_edit.actions[3] ^ 1);

  const auto a = codec().parse_chain(codec().render_chain(depth_edit));
  EXPECT_EQ(a.traces, base.traces);
  EXPECT_EQ(a.actions, base.actions);
  const auto b = codec().parse_chain(codec().render_chain(action_edit));
  EXPECT_EQ(b.depth, base.depth);
  EXPECT_EQ(b.traces, base.traces);
}

TEST(ChainErrors, TraceBeforeDepthIsOrderViolation) {
  const std::string text = std::string(";TRACE=[[0,0]]") + depth_ones() + ";ACTION=" + kTok0;
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(text); }), ChainStage::order);
  EXPECT_EQ(failure_message([&] { codec().parse_chain(text); }).rfind("stage order violation: ", 0), 0u);
}

TEST(ChainErrors, ActionBeforeTraceIsOrderViolation) {
  const std::string text = depth_ones() + ";ACTION=" + kTok0 + ";TRACE=[[0,0]]";
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(text); }), ChainStage::order);
}

TEST(ChainErrors, SixPointTrace) {
  const std::string text = depth_ones() + ";TRACE=[[0,0],[1,1],[2,2],[3,3],[4,4],[5,5]];ACTION=" + kTok0;
  const std::string msg = failure_message([&] { codec().parse_chain(text); });
  EXPECT_EQ(msg.rfind("trace stage: ", 0), 0u) << msg;
  EXPECT_NE(msg.find("trace length 6 exceeds 5 points"), std::string::npos) << msg;
}

TEST(ChainErrors, TraceCoordinateOutOfRange) {
  const std::string text = depth_ones() + ";TRACE=[[0,256]];ACTION=" + kTok0;
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(text); }), ChainStage::trace);
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";TRACE=[];ACTION=" + kTok0); }),
            ChainStage::trace);
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";TRACE=[[01,2]];ACTION=" + kTok0); }),
            ChainStage::trace);
}

TEST(ChainErrors, UnknownActionToken) {
  const std::string text = depth_ones() + ";TRACE=[[0,0]];ACTION=" + kTok0 + " " + kTok0 + " bogus";
  const std::string msg = failure_message([&] { codec().parse_chain(text); });
  EXPECT_EQ(msg.rfind("action stage: ", 0), 0u) << msg;
  EXPECT_NE(msg.find("action vocabulary: unknown token at position 2"), std::string::npos) << msg;
}

TEST(ChainErrors, ShortDepth) {
  std::string depth = "<DEPTH_START>";
  for (int i = 0; i < 50; ++i) depth += "<DEPTH_1>";
  depth += "<DEPTH_END>";
  const std::string msg = failure_message([&] { codec().parse_chain(depth + ";TRACE=[[0,0]];ACTION=" + kTok0); });
  EXPECT_EQ(msg.rfind("depth stage: ", 0), 0u) << msg;
  EXPECT_NE(msg.find("expected 100 tokens, found 50"), std::string::npos) << msg;
}

TEST(ChainErrors, MissingStagesInFullChain) {
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";ACTION=" + kTok0); }), ChainStage::trace);
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";TRACE=[[0,0]]"); }), ChainStage::action);
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";TRACE=[[0,0]];ACTION="); }),
            ChainStage::action);
  EXPECT_EQ(failing_stage([&] { codec().parse_chain(depth_ones() + ";TRACE_R=[[0,0]];ACTION=" + kTok0); }),
            ChainStage::trace);
}

TEST(Targets, KindContracts) {
  Rng rng(11);
  const ReasoningChain c = testing::random_chain(rng, false, 1, 7);
  const ChainParts all{c.depth, c.traces, c.actions};

  const std::string full = codec().render_target(SampleKind::action_reasoning, all);
  EXPECT_EQ(full, codec().render_chain(c));

  const std::string depth_only = codec().render_target(SampleKind::aux_depth, all);
  EXPECT_EQ(depth_only, render_depth_string(c.depth));
  EXPECT_EQ(depth_only.find(';'), std::string::npos);

  const std::string trace_only = codec().render_target(SampleKind::aux_trace, all);
  EXPECT_EQ(trace_only, ";TRACE=" + format_trace_points(c.traces[0]));

  const std::string action_only = codec().render_target(SampleKind::traj_conditioned, all);
  EXPECT_EQ(action_only.rfind(";ACTION=", 0), 0u);
  EXPECT_EQ(action_only.find("<DEPTH"), std::string::npos);
  EXPECT_EQ(action_only.find("TRACE"), std::string::npos);

  for (SampleKind kind : kAllSampleKinds) {
    const ChainParts parsed = codec().parse_target(kind, codec().render_target(kind, all));
    EXPECT_EQ(parsed.depth.has_value(), kind == SampleKind::action_reasoning || kind == SampleKind::aux_depth);
    EXPECT_EQ(!parsed.traces.empty(), kind == SampleKind::action_reasoning || kind == SampleKind::aux_trace);
    EXPECT_EQ(parsed.actions.has_value(),
              kind == SampleKind::action_reasoning || kind == SampleKind::traj_conditioned);
  }
}

TEST(Targets, ExtraOrMissingStageRejected) {
  Rng rng(12);
  const ReasoningChain c = testing::random_chain(rng, false, 1, 7);
  const std::string full = codec().render_chain(c);
  EXPECT_EQ(failing_stage([&] { codec().parse_target(SampleKind::aux_depth, full); }), ChainStage::trace);
  EXPECT_EQ(failing_stage([&] { codec().parse_target(SampleKind::traj_conditioned, full); }), ChainStage::depth);
  EXPECT_EQ(failing_stage([&] { codec().parse_target(SampleKind::action_reasoning, render_depth_string(c.depth)); }),
            ChainStage::trace);
  EXPECT_THROW(codec().render_target(SampleKind::aux_trace, ChainParts{c.depth, {}, c.actions}), ValidationError);
}

TEST(Samples, TrajConditionedLeadsWithOverlay) {
  Rng rng(3);
  const ReasoningChain c = testing::random_chain(rng, false, 1, 7);
  const FrameContext ctx{"pick up the red cup", {"rgb/side_000.png", "rgb/wrist_000.png"}, "overlays/e/000000.png",
                         false};
  const ReasoningSample s = make_sample(codec(), SampleKind::traj_conditioned, ctx, {c.depth, c.traces, c.actions});
  ASSERT_EQ(s.images.size(), 2u);
  EXPECT_EQ(s.images[0], "overlays/e/000000.png");
  EXPECT_EQ(s.images[1], "rgb/wrist_000.png");
  EXPECT_NE(s.prompt.find("pick up the red cup"), std::string::npos);

  FrameContext no_overlay = ctx;
  no_overlay.overlay_ref.reset();
  EXPECT_THROW(make_sample(codec(), SampleKind::traj_conditioned, no_overlay, {c.depth, c.traces, c.actions}),
               ValidationError);
  const ReasoningSample other = make_sample(codec(), SampleKind::action_reasoning, ctx, {c.depth, c.traces, c.actions});
  EXPECT_EQ(other.images, ctx.image_refs);
}

TEST(Samples, JsonRoundTrip) {
  Rng rng(4);
  const ReasoningChain c = testing::random_chain(rng, true, 2, 14);
  const FrameContext ctx{"fold the towel", {"a.png"}, "b.png", true};
  for (SampleKind kind : kAllSampleKinds) {
    const ReasoningSample s = make_sample(codec(), kind, ctx, {c.depth, c.traces, c.actions});
    const std::string line = sample_to_json(s);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(sample_from_json(line), s);
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("kind"), to_string(kind));
  }
  EXPECT_THROW(sample_from_json("{\"kind\":\"nope\"}"), Error);
  EXPECT_THROW(parse_sample_kind("web"), ConfigError);
}

TEST(Steering, FivePointRequest) {
  const VisualTrace t{{{10, 20}, {30, 40}, {50, 60}, {70, 80}, {90, 100}}, Arm::single};
  const SteeringRequest r = make_steering_request("obs.png", "open the drawer", t);
  EXPECT_TRUE(r.sample.inference);
  EXPECT_FALSE(r.sample.target.has_value());
  EXPECT_EQ(r.sample.kind, SampleKind::traj_conditioned);
  EXPECT_EQ(r.sample.prompt, sample_prompt(SampleKind::traj_conditioned, "open the drawer", false));

  const auto j = nlohmann::json::parse(steering_request_to_json(r));
  EXPECT_TRUE(j.at("inference").get<bool>());
  EXPECT_TRUE(j.at("target").is_null());
  EXPECT_EQ(j.at("trace"), nlohmann::json::parse("[[10,20],[30,40],[50,60],[70,80],[90,100]]"));
  EXPECT_EQ(j.at("images"), nlohmann::json::parse("[\"obs.png\"]"));
}

TEST(Steering, RejectsSixPoints) {
  VisualTrace t{{}, Arm::single};
  for (int i = 0; i < 6; ++i) t.points.push_back({i, i});
  EXPECT_THROW(make_steering_request("obs.png", "x", t), ValidationError);
  EXPECT_THROW(make_steering_request("obs.png", "x", VisualTrace{{}, Arm::single}), ValidationError);
}

TEST(Steering, EmptyInstructionDropsTaskClause) {
  const SteeringRequest r = make_steering_request("obs.png", "", VisualTrace{{{1, 1}}, Arm::single});
  EXPECT_EQ(r.sample.prompt.find("The task is"), std::string::npos);
  EXPECT_FALSE(r.sample.prompt.empty());
  const SteeringRequest with = make_steering_request("obs.png", "stack blocks", VisualTrace{{{1, 1}}, Arm::single});
  EXPECT_EQ(with.sample.prompt.rfind("The task is \"stack blocks\". ", 0), 0u);
}

}  // namespace
}  // namespace ardata
