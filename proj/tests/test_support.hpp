#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "graspkit/graspkit.hpp"

namespace gk_test {

namespace gk = graspkit;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline gk::Vec3 uniform_vec(std::mt19937_64& rng, double lo, double hi) {
  return gk::Vec3(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

// Uniform rotation from a normalized Gaussian quaternion.
inline gk::Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline gk::RigidTransform random_motion(std::mt19937_64& rng) {
  gk::RigidTransform m;
  m.rotation = random_rotation(rng);
  m.translation = uniform_vec(rng, -2.0, 2.0);
  return m;
}

// A plausible hand: a random blend of the synthetic shapes, jittered per joint,
// somewhere in the room with a random orientation.
inline gk::HandFrame random_hand(std::mt19937_64& rng, double jitter = 0.004) {
  using gk::synth::PoseKind;
  const PoseKind kinds[] = {PoseKind::open, PoseKind::fist, PoseKind::pinch, PoseKind::relaxed,
                            PoseKind::partial_open};
  const auto a = gk::synth::shape_for(kinds[rng() % 5]);
  const auto b = gk::synth::shape_for(kinds[rng() % 5]);
  gk::RigidTransform place;
  place.rotation = random_rotation(rng);
  place.translation = uniform_vec(rng, -1.0, 1.0);
  gk::HandFrame f = gk::synth::pose_frame(gk::synth::lerp(a, b, uniform(rng, 0.0, 1.0)), place, 0.0);
  for (auto& j : f.joints) j += uniform_vec(rng, -jitter, jitter);
  return f;
}

inline gk::HandFrame moved(gk::HandFrame f, const gk::RigidTransform& m) {
  for (auto& j : f.joints) j = m.apply(j);
  return f;
}

inline gk::HandFrame scaled_about_wrist(gk::HandFrame f, double s) {
  const gk::Vec3 w = f.joint(gk::JointId::Wrist);
  for (auto& j : f.joints) j = w + s * (j - w);
  return f;
}

inline gk::HandFrame at_time(gk::HandFrame f, double t) {
  f.timestamp = t;
  return f;
}

// Hand frame placed so its palm center sits at `center`.
inline gk::HandFrame hand_at(gk::synth::PoseKind kind, const gk::Vec3& center, double t = 0.0) {
  const auto place = gk::RigidTransform::from_translation(center - gk::synth::palm_center_local());
  return gk::synth::pose_frame(gk::synth::shape_for(kind), place, t);
}

inline gk::SceneObject object_at(const std::string& id, const gk::Vec3& center, double radius = 0.05) {
  gk::SceneObject o;
  o.id = id;
  o.pose.translation = center;
  o.bounding_radius = radius;
  return o;
}

// Full-sum reference matcher over every template, masking by hover state.
struct OracleMatch {
  bool found = false;
  gk::GestureId id = 0;
  double score = 0.0;
};

inline OracleMatch brute_force_match(const gk::CanonicalHand& hand, const std::vector<gk::GestureTemplate>& templates,
                                     const std::vector<gk::SceneObject>& objects, gk::GestureRole role) {
  OracleMatch best;
  for (const auto& t : templates) {
    if (t.role != role) continue;
    bool eligible = false;
    for (const auto& o : objects) {
      if (o.hovered && o.has_gesture(t.id)) eligible = true;
    }
    if (!eligible) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < gk::kJointCount; ++i) {
      const gk::Vec3 d = hand.joints_local[i] - t.joints_local[i];
      s += std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
    }
    if (s > t.threshold_sum + 1e-12) continue;
    if (!best.found || s < best.score || (s == best.score && t.id < best.id)) best = {true, t.id, s};
  }
  return best;
}

inline std::string data_dir() { return GRASPKIT_DATA_DIR; }

}  // namespace gk_test
