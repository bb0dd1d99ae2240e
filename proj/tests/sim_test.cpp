#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_support.hpp"

namespace gk = graspkit;
using gk::synth::PoseKind;

namespace {

const gk::Vec3 kSpawn(0.0, 0.9, 0.4);

gk::Scene controller_scene(std::size_t n_objects, std::size_t reps) {
  gk::Scene s;
  s.config.scene_id = "unit";
  for (std::size_t i = 0; i < n_objects; ++i) {
    s.config.objects.push_back(gk_test::object_at("obj" + std::to_string(i), kSpawn, 0.04));
  }
  s.config.protocol.repetitions = reps;
  s.config.protocol.seed = 99;
  return s;
}

gk::HandFrame hand(const gk::Vec3& palm_center, double t, bool grip) {
  gk::HandFrame f = gk_test::hand_at(PoseKind::open, palm_center, t);
  f.grip = grip;
  return f;
}

std::vector<gk::Event> feed(gk::InteractionSimulator& sim, const std::vector<gk::HandFrame>& frames) {
  std::vector<gk::Event> out;
  for (const auto& f : frames) {
    auto ev = sim.step(f);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ColorBand, Edges) {
  EXPECT_EQ(gk::color_band(0.0), gk::ColorBand::green);
  EXPECT_EQ(gk::color_band(0.0199), gk::ColorBand::green);
  EXPECT_EQ(gk::color_band(0.02), gk::ColorBand::yellow);
  EXPECT_EQ(gk::color_band(0.03), gk::ColorBand::yellow);
  EXPECT_EQ(gk::color_band(0.05), gk::ColorBand::red);
  EXPECT_EQ(gk::color_band(0.20), gk::ColorBand::red);
  gk::ColorBands wide{0.1, 0.3};
  EXPECT_EQ(gk::color_band(0.2, wide), gk::ColorBand::yellow);
}

TEST(Sim, ScriptedPlacementMetrics) {
  auto scene = controller_scene(2, 1);
  gk::InteractionSimulator sim(scene, gk::Technique::controller);
  const gk::Vec3 target = sim.target().center;
  EXPECT_EQ(target, scene.config.protocol.first_target);
  const gk::Vec3 dest = target + gk::Vec3(0.03, 0.0, 0.0) - kSpawn;  // palm displacement

  const auto ev = feed(sim, {hand(kSpawn, 0.0, false), hand(kSpawn, 1.2, true), hand(kSpawn + 0.5 * dest, 2.0, true),
                             hand(kSpawn + dest, 3.4, false)});
  ASSERT_EQ(sim.results().size(), 1u);
  const auto& r = sim.results()[0];
  EXPECT_EQ(r.object_id, "obj0");
  EXPECT_NEAR(r.accuracy, 0.03, 1e-6);
  EXPECT_NEAR(r.tct, 2.2, 1e-6);
  EXPECT_FALSE(r.dropped);
  EXPECT_EQ(r.band, gk::ColorBand::yellow);
  EXPECT_EQ(ev.back().kind, gk::EventKind::placed);
  EXPECT_EQ(sim.placements(), 1u);

  // placed object is gone; next trial only after the delay
  EXPECT_FALSE(sim.objects()[0].present);
  sim.step(hand(kSpawn, 4.3, false));
  EXPECT_EQ(sim.trial_index(), 0u);
  sim.step(hand(kSpawn, 4.4, false));
  EXPECT_EQ(sim.trial_index(), 1u);
  EXPECT_EQ(sim.active_object().id, "obj1");
  EXPECT_TRUE(sim.active_object().present);
  EXPECT_NE(sim.target().center, target);
}

TEST(Sim, ReleaseAtCentreIsZeroAccuracy) {
  auto scene = controller_scene(1, 1);
  gk::InteractionSimulator sim(scene, gk::Technique::controller);
  const gk::Vec3 dest = sim.target().center - kSpawn;
  feed(sim, {hand(kSpawn, 0.0, true), hand(kSpawn + dest, 1.0, false)});
  ASSERT_EQ(sim.results().size(), 1u);
  EXPECT_LT(sim.results()[0].accuracy, 1e-12);
  EXPECT_TRUE(sim.finished());
  EXPECT_THROW(sim.step(hand(kSpawn, 2.0, false)), gk::ProtocolViolation);
}

TEST(Sim, ReleaseOutsideIsDropAndObjectStaysGrabbable) {
  auto scene = controller_scene(1, 1);
  gk::InteractionSimulator sim(scene, gk::Technique::controller);
  const gk::Vec3 target = sim.target().center;
  const gk::Vec3 outside = target + gk::Vec3(0.30, 0, 0) - kSpawn;
  feed(sim, {hand(kSpawn, 0.0, false), hand(kSpawn, 0.5, true), hand(kSpawn + outside, 1.5, false)});
  ASSERT_EQ(sim.results().size(), 1u);
  EXPECT_TRUE(sim.results()[0].dropped);
  EXPECT_NEAR(sim.results()[0].accuracy, 0.30, 1e-9);
  EXPECT_TRUE(sim.active_object().present);
  EXPECT_NEAR((sim.active_object().center() - (target + gk::Vec3(0.30, 0, 0))).norm(), 0.0, 1e-9);

  // pick it up where it fell and place it
  const gk::Vec3 there = kSpawn + outside;
  const auto ev = feed(sim, {hand(there, 2.0, true), hand(there - gk::Vec3(0.30, 0, 0), 3.0, false)});
  ASSERT_EQ(sim.results().size(), 2u);
  EXPECT_FALSE(sim.results()[1].dropped);
  EXPECT_NEAR(sim.results()[1].tct, 1.0, 1e-12);
  const auto sum = sim.summary();
  EXPECT_EQ(sum.drops, 1u);
  EXPECT_EQ(sum.placements, 1u);
  EXPECT_TRUE(sum.complete);
  EXPECT_EQ(ev.back().kind, gk::EventKind::placed);
}

TEST(Sim, GripAwayFromObjectDoesNothing) {
  auto scene = controller_scene(1, 1);
  gk::InteractionSimulator sim(scene, gk::Technique::controller);
  const auto ev = feed(sim, {hand(kSpawn + gk::Vec3(0.5, 0, 0), 0.0, true), hand(kSpawn, 0.5, true),
                             hand(kSpawn, 1.0, false)});
  EXPECT_TRUE(sim.results().empty());
  for (const auto& e : ev) EXPECT_NE(e.kind, gk::EventKind::grab);
}

TEST(Sim, BackwardsTimestampIsProtocolViolation) {
  auto scene = controller_scene(1, 1);
  gk::InteractionSimulator sim(scene, gk::Technique::controller);
  sim.step(hand(kSpawn, 1.0, false));
  EXPECT_THROW(sim.step(hand(kSpawn, 0.5, false)), gk::ProtocolViolation);
}

TEST(Sim, RejectsBadScenes) {
  gk::Scene empty;
  EXPECT_THROW(gk::InteractionSimulator(empty, gk::Technique::grab), gk::InvalidArgument);
  auto s = controller_scene(1, 1);
  s.config.objects[0].bounding_radius = 0.0;
  EXPECT_THROW(gk::InteractionSimulator(s, gk::Technique::grab), gk::InvalidArgument);
}

TEST(Sim, TrialOrderIsObjectMajor) {
  auto s = controller_scene(3, 2);
  EXPECT_EQ(gk::trial_order(s.config), (std::vector<std::size_t>{0, 0, 1, 1, 2, 2}));
}

TEST(Sim, TargetSequenceSeededInsideReach) {
  gk::ProtocolParams p;
  p.seed = 5;
  gk::TargetSequence a(p), b(p);
  EXPECT_EQ(a.next(), p.first_target);
  b.next();
  for (int i = 0; i < 200; ++i) {
    const auto v = a.next();
    EXPECT_EQ(v, b.next());
    for (int c = 0; c < 3; ++c) {
      EXPECT_GE(v[c], p.reach.min[c]);
      EXPECT_LT(v[c], p.reach.max[c]);
    }
  }
  p.seed = 6;
  gk::TargetSequence c(p);
  c.next();
  gk::TargetSequence d(gk::ProtocolParams{});
  d.next();
  EXPECT_NE(c.next(), d.next());
}

TEST(Sim, ReleasePolicyDefaults) {
  gk::SceneConfig c;
  EXPECT_EQ(gk::release_policy_for(c, gk::Technique::grab), gk::ReleasePolicy::template_match);
  EXPECT_EQ(gk::release_policy_for(c, gk::Technique::custom), gk::ReleasePolicy::deviation);
  c.release_policy = gk::ReleasePolicy::deviation;
  EXPECT_EQ(gk::release_policy_for(c, gk::Technique::grab), gk::ReleasePolicy::deviation);
}

TEST(Sim, SummaryStatistics) {
  std::vector<gk::TrialResult> r(3);
  r[0].accuracy = 0.01;
  r[0].tct = 1.0;
  r[1].accuracy = 0.03;
  r[1].tct = 3.0;
  r[2].dropped = true;
  r[2].accuracy = 0.4;
  const auto s = gk::summarize(gk::Technique::pinch, r, false);
  EXPECT_EQ(s.placements, 2u);
  EXPECT_EQ(s.drops, 1u);
  EXPECT_NEAR(s.accuracy_mean, 0.02, 1e-15);
  EXPECT_NEAR(s.tct_sd, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(gk::format_summary(s),
            "summary pinch placements=2 drops=1 accuracy_mean=0.020000 accuracy_sd=0.014142 tct_mean=2.000000 "
            "tct_sd=1.414214 complete=0");
}

// ---------------------------------------------------------------------------
// Shipped replays

class ShippedReplay : public ::testing::TestWithParam<gk::Technique> {
 protected:
  static const gk::Scene& scene() {
    static const gk::Scene s = gk::io::load_scene(gk_test::data_dir() + "/study.scene.json");
    return s;
  }
  static std::string name() { return std::string(gk::to_string(GetParam())); }
  static std::vector<gk::HandFrame> frames() {
    return gk::io::read_frames(std::filesystem::path(gk_test::data_dir() + "/replays/" + name() + ".frames"));
  }
};

TEST_P(ShippedReplay, CleanRunHasNoDrops) {
  const auto report = gk::run_replay(scene(), frames(), GetParam());
  EXPECT_TRUE(report.complete);
  EXPECT_EQ(report.summary.placements, 24u);
  EXPECT_EQ(report.summary.drops, 0u);
  // each object three times, in order
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    EXPECT_EQ(report.results[i].object_id, scene().config.objects[i / 3].id);
    EXPECT_GE(report.results[i].tct, 0.0);
  }
}

TEST_P(ShippedReplay, MatchesGoldenTable) {
  const auto report = gk::run_replay(scene(), frames(), GetParam());
  std::ostringstream out;
  gk::io::write_results(out, report.results, report.summary);
  EXPECT_EQ(out.str(), slurp(gk_test::data_dir() + "/golden/" + name() + ".csv"));
}

TEST_P(ShippedReplay, Deterministic) {
  const auto f = frames();
  const auto a = gk::run_replay(scene(), f, GetParam());
  const auto b = gk::run_replay(scene(), f, GetParam());
  EXPECT_EQ(gk::format_summary(a.summary), gk::format_summary(b.summary));
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].accuracy, b.results[i].accuracy);
    EXPECT_EQ(a.results[i].tct, b.results[i].tct);
  }
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i], b.events[i]);
}

TEST_P(ShippedReplay, TruncatedAfterTwentyPlacementsIsIncomplete) {
  const auto f = frames();
  gk::InteractionSimulator sim(scene(), GetParam());
  std::size_t cut = 0;
  while (sim.placements() < 20) sim.step(f[cut++]);
  const std::vector<gk::HandFrame> head(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(cut) + 10);
  try {
    gk::run_replay(scene(), head, GetParam());
    FAIL() << "expected IncompleteRun";
  } catch (const gk::IncompleteRun& e) {
    EXPECT_EQ(e.partial().results.size(), 20u);
    EXPECT_EQ(e.partial().summary.placements, 20u);
    EXPECT_FALSE(e.partial().summary.complete);
  }
}

TEST_P(ShippedReplay, HandComputedMetrics) {
  // accuracy and TCT recomputed from object pose, target and event times at each release
  gk::InteractionSimulator sim(scene(), GetParam());
  double grab_t = -1.0;
  std::size_t k = 0;
  for (const auto& f : frames()) {
    if (sim.finished()) break;
    const std::size_t idx = sim.active_object_index();
    for (const auto& e : sim.step(f)) {
      if (e.kind == gk::EventKind::grab) grab_t = e.timestamp;
      if (e.kind != gk::EventKind::placed) continue;
      const gk::Vec3 d = sim.objects()[idx].center() - sim.target().center;
      const double acc = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
      ASSERT_LT(k, sim.results().size());
      EXPECT_NEAR(sim.results()[k].accuracy, acc, 1e-6);
      EXPECT_NEAR(sim.results()[k].tct, e.timestamp - grab_t, 1e-6);
      EXPECT_LE(acc, 0.25);
      ++k;
    }
  }
  EXPECT_EQ(k, 24u);
}

INSTANTIATE_TEST_SUITE_P(AllTechniques, ShippedReplay,
                         ::testing::Values(gk::Technique::controller, gk::Technique::pinch, gk::Technique::grab,
                                           gk::Technique::custom),
                         [](const auto& info) { return std::string(gk::to_string(info.param)); });
