#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "graspkit/sim.hpp"
#include "graspkit/synth.hpp"

namespace graspkit::synth {

struct ScriptOptions {
  double rate = 30.0;                 // frames per second
  int coordinate_decimals = 4;        // rounding applied to joints; < 0 keeps full precision
  std::uint64_t seed = 11;            // placement offsets
  double max_offset = 0.03;           // object lands this close to the target center (meters)
  Vec3 rest_position = Vec3(0.0, 1.25, 0.0);
  double max_wait = 10.0;             // seconds to wait for the next trial before giving up
};

namespace detail {

inline double round_to(double v, int decimals) {
  if (decimals < 0) return v;
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

inline void round_frame(HandFrame& f, int decimals) {
  f.timestamp = round_to(f.timestamp, 6);
  for (auto& p : f.joints) {
    for (int c = 0; c < 3; ++c) p[c] = round_to(p[c], decimals);
  }
}

struct TechniqueShapes {
  HandShape approach;
  HandShape grasp;
  HandShape release;
};

inline TechniqueShapes shapes_for(Technique t, std::size_t object_index) {
  switch (t) {
    case Technique::controller:
      return {shape_for(PoseKind::relaxed), shape_for(PoseKind::relaxed), shape_for(PoseKind::relaxed)};
    case Technique::pinch:
      return {shape_for(PoseKind::relaxed), shape_for(PoseKind::pinch), shape_for(PoseKind::relaxed)};
    case Technique::grab:
      return {shape_for(PoseKind::open), shape_for(PoseKind::fist), shape_for(PoseKind::partial_open)};
    case Technique::custom:
      return {shape_for(PoseKind::open), object_grasp_shape(object_index), shape_for(PoseKind::open)};
  }
  return {};
}

}  // namespace detail

/// Offset of the object from the target center at release for trial k.
class PlacementOffsets {
 public:
  PlacementOffsets(std::uint64_t seed, double max_offset) : rng_(seed), max_offset_(max_offset) {}

  Vec3 next() {
    const auto uniform = [this] { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; };
    Vec3 dir(uniform() - 0.5, uniform() - 0.5, uniform() - 0.5);
    if (dir.norm() < 1e-6) dir = Vec3::UnitX();
    return dir.normalized() * (0.1 + 0.9 * uniform()) * max_offset_;
  }

 private:
  std::mt19937_64 rng_;
  double max_offset_;
};

/// A clean, scripted performance of the full grab-and-place protocol with one
/// technique. The script runs a simulator alongside so each approach starts once
/// the next object has appeared; the returned stream replays to the same run.
inline std::vector<HandFrame> script_protocol_run(const Scene& scene, Technique technique,
                                                  const ScriptOptions& opt = {}) {
  InteractionSimulator sim(scene, technique);
  PlacementOffsets offsets(opt.seed, opt.max_offset);
  std::vector<HandFrame> frames;
  std::size_t frame_index = 0;
  const auto now = [&] { return static_cast<double>(frame_index) / opt.rate; };

  const auto emit = [&](HandFrame f) {
    detail::round_frame(f, opt.coordinate_decimals);
    if (technique != Technique::controller) f.grip.reset();
    sim.step(f);
    frames.push_back(std::move(f));
    ++frame_index;
  };

  const RigidTransform rest = RigidTransform::from_translation(opt.rest_position);
  while (!sim.finished()) {
    const std::size_t trial = sim.trial_index();
    const double t0 = now();
    const Vec3 spawn = sim.active_object().center();
    const Vec3 goal = sim.target().center + offsets.next();
    const auto shapes = detail::shapes_for(technique, sim.active_object_index());

    const RigidTransform at_object = RigidTransform::from_translation(spawn - palm_center_local());
    const RigidTransform at_goal = RigidTransform::from_translation(at_object.translation + (goal - spawn));
    const bool grip_used = technique == Technique::controller;

    KeyframeTrack track;
    track.add(t0, shapes.approach, rest, grip_used ? std::optional<bool>(false) : std::nullopt);
    track.add(t0 + 0.2, shapes.approach, rest, grip_used ? std::optional<bool>(false) : std::nullopt);
    track.add(t0 + 0.7, shapes.approach, at_object, grip_used ? std::optional<bool>(false) : std::nullopt);
    track.add(t0 + 0.85, lerp(shapes.approach, shapes.grasp, 0.5), at_object,
              grip_used ? std::optional<bool>(true) : std::nullopt);
    track.add(t0 + 1.0, shapes.grasp, at_object, grip_used ? std::optional<bool>(true) : std::nullopt);
    track.hold_until(t0 + 1.3);
    track.add(t0 + 2.3, shapes.grasp, at_goal, track.back().grip);
    track.hold_until(t0 + 2.5);
    track.add(t0 + 2.6, lerp(shapes.grasp, shapes.release, 1.0 / 3.0), at_goal,
              grip_used ? std::optional<bool>(false) : std::nullopt);
    track.add(t0 + 2.8, shapes.release, at_goal, track.back().grip);
    track.hold_until(t0 + 3.1);
    track.add(t0 + 3.6, shape_for(technique == Technique::grab || technique == Technique::custom ? PoseKind::open
                                                                                                  : PoseKind::relaxed),
              rest, track.back().grip);

    while (now() <= track.end_time() + 1e-9 && !sim.finished()) emit(track.sample(now()));

    const double wait_start = now();
    while (!sim.finished() && sim.trial_index() == trial) {
      if (now() - wait_start > opt.max_wait) {
        throw InvalidState("scripted run stalled in trial " + std::to_string(trial));
      }
      emit(track.sample(now()));
    }
  }
  return frames;
}

}  // namespace graspkit::synth
