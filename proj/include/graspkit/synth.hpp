#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "graspkit/hand_model.hpp"

namespace graspkit::synth {

enum class PoseKind : std::uint8_t { open, fist, pinch, relaxed, partial_open };

constexpr std::string_view to_string(PoseKind k) {
  switch (k) {
    case PoseKind::open: return "open";
    case PoseKind::fist: return "fist";
    case PoseKind::pinch: return "pinch";
    case PoseKind::relaxed: return "relaxed";
    case PoseKind::partial_open: return "partial_open";
  }
  return "?";
}

inline std::optional<PoseKind> parse_pose_kind(std::string_view s) {
  if (s == "open") return PoseKind::open;
  if (s == "fist") return PoseKind::fist;
  if (s == "pinch") return PoseKind::pinch;
  if (s == "relaxed") return PoseKind::relaxed;
  if (s == "partial_open" || s == "partial-open") return PoseKind::partial_open;
  return std::nullopt;
}

/// Articulation of the synthetic hand: flexion (radians) of the three joints of each
/// finger (index..pinky) and of the thumb, finger splay, and how far the thumb tip
/// is pulled onto the index tip.
struct HandShape {
  std::array<std::array<double, 3>, 4> finger_curl{};
  std::array<double, 4> spread{};
  std::array<double, 3> thumb_curl{};
  double pinch_blend = 0.0;
};

inline constexpr double kPinchGap = 0.015;  // thumb tip to index tip in a full pinch

inline HandShape shape_for(PoseKind kind) {
  HandShape s;
  const auto fingers = [&](std::array<double, 3> c) { s.finger_curl.fill(c); };
  switch (kind) {
    case PoseKind::open:
      fingers({0.0, 0.0, 0.0});
      s.spread = {0.12, 0.0, -0.1, -0.2};
      s.thumb_curl = {0.0, 0.0, 0.0};
      break;
    case PoseKind::relaxed:
      fingers({0.35, 0.4, 0.25});
      s.spread = {0.06, 0.0, -0.05, -0.1};
      s.thumb_curl = {0.2, 0.2, 0.1};
      break;
    case PoseKind::partial_open:
      fingers({0.8, 0.9, 0.5});
      s.spread = {0.03, 0.0, -0.03, -0.05};
      s.thumb_curl = {0.35, 0.5, 0.35};
      break;
    case PoseKind::fist:
      fingers({1.45, 1.55, 1.0});
      s.thumb_curl = {0.6, 1.0, 0.7};
      break;
    case PoseKind::pinch:
      fingers({0.5, 0.6, 0.4});
      s.finger_curl[0] = {0.7, 0.8, 0.5};
      s.spread = {0.04, 0.0, -0.04, -0.08};
      s.thumb_curl = {0.3, 0.4, 0.2};
      s.pinch_blend = 1.0;
      break;
  }
  return s;
}

inline HandShape lerp(const HandShape& a, const HandShape& b, double w) {
  HandShape s;
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t k = 0; k < 3; ++k) s.finger_curl[f][k] = a.finger_curl[f][k] + w * (b.finger_curl[f][k] - a.finger_curl[f][k]);
    s.spread[f] = a.spread[f] + w * (b.spread[f] - a.spread[f]);
  }
  for (std::size_t k = 0; k < 3; ++k) s.thumb_curl[k] = a.thumb_curl[k] + w * (b.thumb_curl[k] - a.thumb_curl[k]);
  s.pinch_blend = a.pinch_blend + w * (b.pinch_blend - a.pinch_blend);
  return s;
}

/// Object-tailored grasp used for sample data: a blend between a relaxed and a
/// closed hand that differs per object index.
inline HandShape object_grasp_shape(std::size_t object_index) {
  const double w = 0.3 + 0.09 * static_cast<double>(object_index % 8);
  return lerp(shape_for(PoseKind::relaxed), shape_for(PoseKind::fist), w);
}

namespace detail {

// Right-hand reference geometry (meters) in palm coordinates:
// x toward the index side, y out of the back of the hand, z along the fingers.
struct FingerGeometry {
  Vec3 metacarpal;
  Vec3 proximal;
  std::array<double, 3> segments;
};

inline const std::array<FingerGeometry, 4>& finger_geometry() {
  static const std::array<FingerGeometry, 4> g = {{
      {Vec3(0.012, 0.0, 0.025), Vec3(0.022, 0.0, 0.085), {0.040, 0.024, 0.021}},
      {Vec3(0.0, 0.0, 0.030), Vec3(0.0, 0.0, 0.090), {0.045, 0.028, 0.023}},
      {Vec3(-0.012, 0.0, 0.028), Vec3(-0.018, 0.0, 0.084), {0.042, 0.026, 0.022}},
      {Vec3(-0.022, 0.0, 0.024), Vec3(-0.030, 0.0, 0.074), {0.032, 0.019, 0.019}},
  }};
  return g;
}

inline const Vec3 kThumbBase(0.02, -0.012, 0.02);
inline constexpr std::array<double, 3> kThumbSegments = {0.032, 0.028, 0.022};

}  // namespace detail

/// Joint positions of a right hand of reference size in palm coordinates.
inline JointArray local_joints(const HandShape& shape) {
  JointArray j = zero_joints();
  // Thumb: bends in the plane spanned by its rest direction and the palm.
  const Vec3 rest = Vec3(0.6, -0.3, 0.74).normalized();
  Vec3 bend(-0.4, 0.0, 0.2);
  bend = (bend - rest * bend.dot(rest)).normalized();
  Vec3 p = detail::kThumbBase;
  j[index_of(JointId::ThumbMetacarpal)] = p;
  double angle = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    angle += shape.thumb_curl[k];
    p += detail::kThumbSegments[k] * (std::cos(angle) * rest + std::sin(angle) * bend);
    j[index_of(JointId::ThumbMetacarpal) + 1 + k] = p;
  }

  const auto& geometry = detail::finger_geometry();
  for (std::size_t f = 0; f < 4; ++f) {
    const std::size_t first = index_of(JointId::IndexMetacarpal) + 5 * f;
    const auto& g = geometry[f];
    j[first] = g.metacarpal;
    Vec3 q = g.proximal;
    j[first + 1] = q;
    double a = 0.0;
    const double sp = shape.spread[f];
    for (std::size_t k = 0; k < 3; ++k) {
      a += shape.finger_curl[f][k];
      q += g.segments[k] * Vec3(std::sin(sp) * std::cos(a), -std::sin(a), std::cos(sp) * std::cos(a));
      j[first + 2 + k] = q;
    }
  }

  if (shape.pinch_blend > 0.0) {
    Vec3& thumb_tip = j[index_of(JointId::ThumbTip)];
    const Vec3& index_tip = j[index_of(JointId::IndexTip)];
    const Vec3 toward = j[index_of(JointId::ThumbDistal)] - index_tip;
    const Vec3 pinched = index_tip + kPinchGap * toward.normalized();
    thumb_tip = thumb_tip + shape.pinch_blend * (pinched - thumb_tip);
  }
  return j;
}

/// Place a shape in the world. Left hands are the mirror image across the palm's
/// lateral axis; `scale` is the hand size relative to the reference hand.
inline HandFrame pose_frame(const HandShape& shape, const RigidTransform& placement, double t,
                            Side side = Side::right, double scale = 1.0) {
  HandFrame f;
  f.timestamp = t;
  f.side = side;
  const JointArray local = local_joints(shape);
  for (std::size_t i = 0; i < kJointCount; ++i) {
    Vec3 p = local[i] * scale;
    if (side == Side::left) p.x() = -p.x();
    f.joints[i] = placement.apply(p);
  }
  return f;
}

/// Point in the hollow of the hand: midway between wrist and middle knuckle.
inline Vec3 palm_center(const HandFrame& f) {
  return 0.5 * (f.joint(JointId::Wrist) + f.joint(JointId::MiddleProximal));
}

/// Palm-local offset of palm_center() for a reference-size hand.
inline Vec3 palm_center_local() { return 0.5 * detail::finger_geometry()[1].proximal; }

/// Default placement of single-pose streams: hand in front of the user, fingers
/// forward, back of the hand up.
inline RigidTransform default_placement() { return RigidTransform::from_translation(Vec3(0.0, 1.0, 0.3)); }

/// Gaussian joint noise from a seeded 64-bit Mersenne Twister. Box-Muller over raw
/// draws keeps streams identical across standard library implementations.
class JointNoise {
 public:
  JointNoise(double sigma, std::uint64_t seed) : sigma_(sigma), rng_(seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  }

  double gaussian() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

  void apply(HandFrame& f) {
    if (sigma_ == 0.0) return;
    for (auto& p : f.joints) {
      for (int c = 0; c < 3; ++c) p[c] += sigma_ * gaussian();
    }
  }

  double sigma() const { return sigma_; }

 private:
  double sigma_;
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

/// Static pose with per-frame noise; deterministic per seed.
class PoseGenerator {
 public:
  PoseGenerator(PoseKind kind, double sigma, std::uint64_t seed, RigidTransform placement = default_placement(),
                Side side = Side::right)
      : base_(pose_frame(shape_for(kind), placement, 0.0, side)), noise_(sigma, seed) {}

  HandFrame at(double t) {
    HandFrame f = base_;
    f.timestamp = t;
    noise_.apply(f);
    return f;
  }

 private:
  HandFrame base_;
  JointNoise noise_;
};

/// `duration * rate + 1` frames at t = i / rate.
inline std::vector<HandFrame> generate_stream(PoseKind kind, double sigma, std::uint64_t seed, double duration,
                                              double rate, RigidTransform placement = default_placement()) {
  if (!(rate > 0.0)) throw InvalidArgument("frame rate must be positive");
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be non-negative");
  PoseGenerator gen(kind, sigma, seed, placement);
  const auto count = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
  std::vector<HandFrame> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.at(static_cast<double>(i) / rate));
  return out;
}

/// Piecewise-linear animation between keyframes: shapes and positions are
/// interpolated linearly, orientations by slerp, the grip bit holds the value of
/// the preceding keyframe.
class KeyframeTrack {
 public:
  struct Key {
    double time;
    HandShape shape;
    RigidTransform placement;
    std::optional<bool> grip;
  };

  void add(double time, const HandShape& shape, const RigidTransform& placement, std::optional<bool> grip = {}) {
    if (!keys_.empty() && time < keys_.back().time) throw InvalidArgument("keyframes must be time ordered");
    keys_.push_back({time, shape, placement, grip});
  }

  /// Hold the last pose until `time`.
  void hold_until(double time) {
    if (keys_.empty()) throw InvalidState("no keyframe to hold");
    const Key last = keys_.back();
    add(time, last.shape, last.placement, last.grip);
  }

  bool empty() const { return keys_.empty(); }
  const Key& back() const { return keys_.back(); }
  double start_time() const { return keys_.front().time; }
  double end_time() const { return keys_.back().time; }

  HandFrame sample(double t, Side side = Side::right, double scale = 1.0) const {
    if (keys_.empty()) throw InvalidState("empty keyframe track");
    if (t <= keys_.front().time) return frame_of(keys_.front(), t, side, scale);
    if (t >= keys_.back().time) return frame_of(keys_.back(), t, side, scale);
    std::size_t i = 1;
    while (keys_[i].time < t) ++i;
    const Key& a = keys_[i - 1];
    const Key& b = keys_[i];
    const double span = b.time - a.time;
    const double w = span > 0.0 ? (t - a.time) / span : 1.0;
    Key k;
    k.time = t;
    k.shape = lerp(a.shape, b.shape, w);
    k.placement.translation = a.placement.translation + w * (b.placement.translation - a.placement.translation);
    const Eigen::Quaterniond qa(a.placement.rotation);
    const Eigen::Quaterniond qb(b.placement.rotation);
    k.placement.rotation = qa.slerp(w, qb).toRotationMatrix();
    k.grip = a.grip;
    return frame_of(k, t, side, scale);
  }

 private:
  static HandFrame frame_of(const Key& k, double t, Side side, double scale) {
    HandFrame f = pose_frame(k.shape, k.placement, t, side, scale);
    f.grip = k.grip;
    return f;
  }

  std::vector<Key> keys_;
};

}  // namespace graspkit::synth
