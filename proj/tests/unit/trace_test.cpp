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

#include <gtest/gtest.h>

#include "ardata/error.hpp"
#include "oracles.hpp"

namespace ardata {
namespace {

TEST(RescalePoint, Endpoints) {
  EXPECT_EQ(rescale_point({0, 0}), (TracePoint{0, 0}));
  EXPECT_EQ(rescale_point({100, 100}), (TracePoint{255, 255}));
}

TEST(RescalePoint, HalfRoundsUp) {
  EXPECT_EQ(rescale_point({50, 50}), (TracePoint{128, 128}));
  EXPECT_EQ(rescale_point({20, 80}), (TracePoint{51, 204}));
}

TEST(RescalePoint, OutOfRangeFails) {
  EXPECT_THROW(rescale_point({-0.1, 5}), ValidationError);
  EXPECT_THROW(rescale_point({5, 100.5}), ValidationError);
}

TEST(RescalePoint, MonotoneOverFineGrid) {
  int prev = -1;
  for (int i = 0; i <= 100000; ++i) {
    const int u = rescale_point({i / 1000.0, 0}).u;
    EXPECT_GE(u, prev);
    prev = u;
  }
  EXPECT_EQ(prev, 255);
}

TEST(SubsampleIndices, ShortAndDegenerateSpans) {
  EXPECT_EQ(subsample_indices(7, 7), (std::vector<std::size_t>{7}));
  EXPECT_EQ(subsample_indices(0, 2), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(subsample_indices(0, 10), (std::vector<std::size_t>{0, 3, 5, 8, 10}));
}

TEST(SubsampleIndices, StartAfterEndFails) { EXPECT_THROW(subsample_indices(5, 4), ValidationError); }

TEST(SubsampleIndices, MatchesProseOracleExhaustively) {
  for (std::size_t t = 0; t <= 40; ++t) {
    for (std::size_t e = t; e <= t + 20; ++e) {
      EXPECT_EQ(subsample_indices(t, e), oracle::subsample(t, e)) << t << "," << e;
    }
  }
}

TEST(SubsampleIndices, ShapeInvariantsUpToLongHorizons) {
  for (std::size_t t : {0u, 1u, 13u, 999u}) {
    for (std::size_t e = t; e <= t + 2000; ++e) {
      const auto idx = subsample_indices(t, e);
      ASSERT_EQ(idx.size(), std::min<std::size_t>(e - t + 1, 5));
      EXPECT_EQ(idx.front(), t);
      EXPECT_EQ(idx.back(), e);
      for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LT(idx[i - 1], idx[i]);
    }
  }
}

TEST(BuildTrace, StationaryGripper) {
  const GripperTrack track(11, GripperPoint{50, 50});
  const auto trace = build_trace(track, 0, 10);
  EXPECT_EQ(trace.points, std::vector<TracePoint>(5, TracePoint{128, 128}));
  EXPECT_EQ(trace.arm, Arm::single);
}

TEST(BuildTrace, SinglePointAtEpisodeEnd) {
  const GripperTrack track(11, GripperPoint{10, 20});
  EXPECT_EQ(build_trace(track, 10, 10).points.size(), 1u);
}

TEST(BuildTrace, LinearMotionHitsOracleIndices) {
  GripperTrack track;
  for (int f = 0; f <= 10; ++f) track.push_back({f * 10.0, 100.0 - f * 10.0});
  const auto trace = build_trace(track, 0, 10);
  const auto idx = oracle::subsample(0, 10);
  ASSERT_EQ(trace.points.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(trace.points[i], rescale_point(track[idx[i]]));
  EXPECT_EQ(trace.points.front(), rescale_point(track[0]));
}

TEST(BuildTrace, TrackTooShortFails) {
  const GripperTrack track(3, GripperPoint{1, 1});
  EXPECT_THROW(build_trace(track, 0, 3), ValidationError);
}

Episode two_arm_episode(const GripperTrack& left, const GripperTrack& right) {
  Episode ep;
  ep.id = "bi";
  for (std::size_t f = 0; f < left.size(); ++f) {
    Frame fr;
    fr.index = static_cast<std::uint32_t>(f);
    fr.rgb_refs = {"a.png"};
    fr.gripper_points = {left[f], right[f]};
    fr.action = {0.0};
    fr.instruction = "fold";
    ep.frames.push_back(fr);
  }
  validate_episode(ep);
  return ep;
}

TEST(BimanualTraces, IdenticalTracksDifferOnlyInArm) {
  GripperTrack track;
  for (int f = 0; f < 12; ++f) track.push_back({f * 7.0, 30.0});
  const auto [l, r] = build_bimanual_traces(track, track, 2, 11);
  EXPECT_EQ(l.points, r.points);
  EXPECT_EQ(l.arm, Arm::left);
  EXPECT_EQ(r.arm, Arm::right);
}

TEST(BimanualTraces, PerArmOracle) {
  GripperTrack left, right;
  for (int f = 0; f < 30; ++f) {
    left.push_back({f * 3.0, 10.0 + f});
    right.push_back({90.0 - f * 2.0, 80.0 - f});
  }
  const Episode ep = two_arm_episode(left, right);
  for (std::size_t t = 0; t < 30; ++t) {
    const auto [l, r] = build_bimanual_traces(ep, t);
    const auto idx = oracle::subsample(t, 29);
    ASSERT_EQ(l.points.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      EXPECT_EQ(l.points[i], rescale_point(left[idx[i]]));
      EXPECT_EQ(r.points[i], rescale_point(right[idx[i]]));
    }
  }
}

TEST(BimanualTraces, SingleArmEpisodeRejected) {
  Episode ep;
  ep.id = "one";
  Frame fr;
  fr.rgb_refs = {"a.png"};
  fr.gripper_points = {{1, 1}};
  fr.action = {0.0};
  ep.frames.push_back(fr);
  validate_episode(ep);
  EXPECT_THROW(build_bimanual_traces(ep, 0), ValidationError);
}

TEST(ValidateTrace, Bounds) {
  EXPECT_THROW(validate_trace({}), ValidationError);
  EXPECT_THROW(validate_trace({std::vector<TracePoint>(6), Arm::single}), ValidationError);
  EXPECT_THROW(validate_trace({{{256, 0}}, Arm::single}), ValidationError);
  EXPECT_NO_THROW(validate_trace({std::vector<TracePoint>(5), Arm::single}));
}

}  // namespace
}  // namespace ardata
