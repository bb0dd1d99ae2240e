#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace gk = graspkit;
namespace synth = graspkit::synth;
using gk::JointId;
using synth::PoseKind;

TEST(Synth, PinchGap) {
  const auto f = synth::generate_stream(PoseKind::pinch, 0.0, 1, 0.0, 90.0)[0];
  EXPECT_NEAR((f.joint(JointId::ThumbTip) - f.joint(JointId::IndexTip)).norm(), 0.015, 1e-12);
}

TEST(Synth, FistTipsNearPalmCentre) {
  const auto f = synth::generate_stream(PoseKind::fist, 0.0, 1, 0.0, 90.0)[0];
  const gk::Vec3 c = synth::palm_center(f);
  for (auto tip : gk::kFingertips) EXPECT_LT((f.joint(tip) - c).norm(), 0.04) << gk::index_of(tip);
}

TEST(Synth, OpenHandTipsFarFromPalm) {
  const auto f = synth::generate_stream(PoseKind::open, 0.0, 1, 0.0, 90.0)[0];
  EXPECT_GT((f.joint(JointId::MiddleTip) - synth::palm_center(f)).norm(), 0.1);
  EXPECT_GT((f.joint(JointId::ThumbTip) - f.joint(JointId::IndexTip)).norm(), 0.03);
}

TEST(Synth, ReferenceHandHasUnitScale) {
  for (auto k : {PoseKind::open, PoseKind::fist, PoseKind::pinch, PoseKind::relaxed, PoseKind::partial_open}) {
    EXPECT_NEAR(gk::hand_scale(synth::generate_stream(k, 0.0, 1, 0.0, 1.0)[0]), 1.0, 1e-12);
  }
}

TEST(Synth, NoiselessFistMatchesItsTemplate) {
  const auto s = synth::generate_stream(PoseKind::fist, 0.0, 7, 1.0, 90.0);
  const auto t = gk::make_template(s.front(), 1, "fist", "");
  for (const auto& f : s) EXPECT_EQ(gk::similarity(gk::canonicalize(f), t), 0.0);
}

TEST(Synth, NoiselessPinchStartsAfterDwell) {
  const auto s = synth::generate_stream(PoseKind::pinch, 0.0, 7, 1.0, 90.0);
  gk::PinchState ps;
  std::vector<double> starts;
  for (const auto& f : s) {
    if (auto e = gk::pinch_update(ps, f)) {
      EXPECT_EQ(*e, gk::PinchEvent::start);
      starts.push_back(f.timestamp);
    }
  }
  ASSERT_EQ(starts.size(), 1u);
  EXPECT_NEAR(starts[0], 0.1, 1.0 / 90.0);
}

TEST(Synth, SameSeedSameStream) {
  const auto a = synth::generate_stream(PoseKind::relaxed, 0.003, 42, 2.0, 90.0);
  const auto b = synth::generate_stream(PoseKind::relaxed, 0.003, 42, 2.0, 90.0);
  const auto c = synth::generate_stream(PoseKind::relaxed, 0.003, 43, 2.0, 90.0);
  ASSERT_EQ(a.size(), 181u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(gk::io::format_frame_line(a[i]), gk::io::format_frame_line(b[i]));
    differs |= gk::io::format_frame_line(a[i]) != gk::io::format_frame_line(c[i]);
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, NoiseStandardDeviation) {
  for (double sigma : {0.001, 0.005, 0.02}) {
    const auto clean = synth::generate_stream(PoseKind::open, 0.0, 3, 0.0, 1.0)[0];
    const auto s = synth::generate_stream(PoseKind::open, sigma, 3, 5.0, 90.0);
    double sum = 0, sum_sq = 0;
    std::size_t n = 0;
    for (const auto& f : s) {
      for (std::size_t j = 0; j < gk::kJointCount; ++j) {
        for (int c = 0; c < 3; ++c) {
          const double d = f.joints[j][c] - clean.joints[j][c];
          sum += d;
          sum_sq += d * d;
          ++n;
        }
      }
    }
    ASSERT_GE(n, 10000u);
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
    EXPECT_NEAR(sd, sigma, 0.1 * sigma);
    EXPECT_LT(std::fabs(mean), 0.05 * sigma);
  }
}

TEST(Synth, RejectsBadArguments) {
  EXPECT_THROW(synth::generate_stream(PoseKind::open, -1.0, 1, 1.0, 90.0), gk::InvalidArgument);
  EXPECT_THROW(synth::generate_stream(PoseKind::open, 0.0, 1, 1.0, 0.0), gk::InvalidArgument);
  EXPECT_FALSE(synth::parse_pose_kind("claw"));
  EXPECT_EQ(synth::parse_pose_kind("partial-open"), PoseKind::partial_open);
}

TEST(Synth, LeftHandIsMirrorImage) {
  const auto r = synth::pose_frame(synth::shape_for(PoseKind::pinch), gk::RigidTransform{}, 0.0, gk::Side::right);
  const auto l = synth::pose_frame(synth::shape_for(PoseKind::pinch), gk::RigidTransform{}, 0.0, gk::Side::left);
  for (std::size_t j = 0; j < gk::kJointCount; ++j) {
    EXPECT_NEAR(l.joints[j].x(), -r.joints[j].x(), 1e-15);
    EXPECT_NEAR(l.joints[j].y(), r.joints[j].y(), 1e-15);
  }
  const auto t = gk::make_template(r, 1, "", "");
  EXPECT_LT(gk::similarity(gk::canonicalize(l), t), 1e-12);
}

TEST(Synth, KeyframeInterpolation) {
  synth::KeyframeTrack track;
  const auto a = gk::RigidTransform::from_translation(gk::Vec3(0, 1, 0));
  const auto b = gk::RigidTransform::from_translation(gk::Vec3(1, 1, 0));
  track.add(0.0, synth::shape_for(PoseKind::open), a, false);
  track.add(1.0, synth::shape_for(PoseKind::fist), b, true);
  const auto mid = track.sample(0.5);
  const auto expect = synth::pose_frame(synth::lerp(synth::shape_for(PoseKind::open), synth::shape_for(PoseKind::fist), 0.5),
                                        gk::RigidTransform::from_translation(gk::Vec3(0.5, 1, 0)), 0.5);
  for (std::size_t j = 0; j < gk::kJointCount; ++j) EXPECT_LT((mid.joints[j] - expect.joints[j]).norm(), 1e-12);
  EXPECT_EQ(mid.grip, false);
  EXPECT_EQ(track.sample(2.0).grip, true);
  EXPECT_THROW(track.add(0.5, synth::shape_for(PoseKind::open), a), gk::InvalidArgument);
}

TEST(Synth, ScriptedRunReplaysToSameResult) {
  const auto scene = gk::io::load_scene(gk_test::data_dir() + "/study.scene.json");
  const auto frames = synth::script_protocol_run(scene, gk::Technique::pinch);
  const auto report = gk::run_replay(scene, frames, gk::Technique::pinch);
  EXPECT_EQ(report.summary.placements, 24u);
  EXPECT_EQ(report.summary.drops, 0u);
  const auto again = synth::script_protocol_run(scene, gk::Technique::pinch);
  ASSERT_EQ(again.size(), frames.size());
  EXPECT_EQ(gk::io::format_frame_line(again[again.size() / 2]), gk::io::format_frame_line(frames[frames.size() / 2]));
}
