#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "graspkit/error.hpp"

namespace graspkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr std::size_t kJointCount = 25;

/// Wrist, four thumb joints, then five joints per finger (index..pinky).
enum class JointId : std::uint8_t {
  Wrist = 0,
  ThumbMetacarpal,
  ThumbProximal,
  ThumbDistal,
  ThumbTip,
  IndexMetacarpal,
  IndexProximal,
  IndexIntermediate,
  IndexDistal,
  IndexTip,
  MiddleMetacarpal,
  MiddleProximal,
  MiddleIntermediate,
  MiddleDistal,
  MiddleTip,
  RingMetacarpal,
  RingProximal,
  RingIntermediate,
  RingDistal,
  RingTip,
  PinkyMetacarpal,
  PinkyProximal,
  PinkyIntermediate,
  PinkyDistal,
  PinkyTip,
};

constexpr std::size_t index_of(JointId id) { return static_cast<std::size_t>(id); }

inline constexpr std::array<JointId, 5> kFingertips = {
    JointId::ThumbTip, JointId::IndexTip, JointId::MiddleTip, JointId::RingTip, JointId::PinkyTip};

enum class Side : std::uint8_t { left, right };

constexpr std::string_view to_string(Side side) { return side == Side::left ? "left" : "right"; }

using JointArray = std::array<Vec3, kJointCount>;

inline JointArray zero_joints() {
  JointArray joints;
  joints.fill(Vec3::Zero());
  return joints;
}

/// One tracker sample: 25 world-space joint positions in meters.
struct HandFrame {
  double timestamp = 0.0;
  Side side = Side::right;
  JointArray joints = zero_joints();
  std::optional<bool> grip;  // controller streams only

  const Vec3& joint(JointId id) const { return joints[index_of(id)]; }
  Vec3& joint(JointId id) { return joints[index_of(id)]; }
};

inline bool all_finite(const HandFrame& frame) {
  if (!std::isfinite(frame.timestamp)) return false;
  for (const auto& j : frame.joints) {
    if (!j.allFinite()) return false;
  }
  return true;
}

/// Proper rigid motion: p -> rotation * p + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  RigidTransform operator*(const RigidTransform& rhs) const {
    RigidTransform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
  }

  static RigidTransform from_translation(const Vec3& t) {
    RigidTransform out;
    out.translation = t;
    return out;
  }
};

/// Joints expressed in the wrist-anchored palm frame, divided by the hand scale.
struct CanonicalHand {
  JointArray joints_local = zero_joints();
  double scale = 1.0;
};

inline constexpr double kReferenceHandLength = 0.09;  // wrist -> middle proximal, meters
inline constexpr double kDegenerateTolerance = 1e-9;

/// Palm frame of a hand. Columns of the rotation are (lateral, palm normal, forward);
/// the origin is the wrist.
///
/// forward = MiddleMetacarpal - Wrist, normal = forward x (IndexMetacarpal - PinkyMetacarpal)
/// for right hands. Left hands use (PinkyMetacarpal - IndexMetacarpal) so the normal keeps
/// pointing out of the back of the hand and the basis stays right-handed.
inline RigidTransform palm_frame(const HandFrame& frame) {
  const Vec3& wrist = frame.joint(JointId::Wrist);
  const Vec3 forward_raw = frame.joint(JointId::MiddleMetacarpal) - wrist;
  const double forward_len = forward_raw.norm();
  if (!(forward_len > kDegenerateTolerance)) {
    throw DegenerateHand("wrist and middle metacarpal coincide");
  }
  const Vec3 forward = forward_raw / forward_len;

  Vec3 across = frame.joint(JointId::IndexMetacarpal) - frame.joint(JointId::PinkyMetacarpal);
  if (frame.side == Side::left) across = -across;
  if (!(across.norm() > kDegenerateTolerance)) {
    throw DegenerateHand("index and pinky metacarpals coincide");
  }
  const Vec3 normal_raw = forward.cross(across);
  const double normal_len = normal_raw.norm();
  if (!(normal_len > kDegenerateTolerance)) {
    throw DegenerateHand("palm anchor joints are collinear");
  }
  const Vec3 normal = normal_raw / normal_len;
  const Vec3 lateral = normal.cross(forward);

  RigidTransform out;
  out.rotation.col(0) = lateral;
  out.rotation.col(1) = normal;
  out.rotation.col(2) = forward;
  out.translation = wrist;
  return out;
}

/// Measured hand size relative to the reference hand.
inline double hand_scale(const HandFrame& frame) {
  const double len = (frame.joint(JointId::MiddleProximal) - frame.joint(JointId::Wrist)).norm();
  if (!(len > kDegenerateTolerance)) {
    throw DegenerateHand("wrist and middle proximal coincide");
  }
  return len / kReferenceHandLength;
}

/// World -> palm-local coordinates, divided by hand scale. Left hands are mirrored
/// across the lateral axis so one template serves both sides.
inline CanonicalHand canonicalize(const HandFrame& frame) {
  const RigidTransform palm = palm_frame(frame);
  CanonicalHand out;
  out.scale = hand_scale(frame);
  const Mat3 to_local = palm.rotation.transpose();
  const double inv_scale = 1.0 / out.scale;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    Vec3 local = to_local * (frame.joints[i] - palm.translation) * inv_scale;
    if (frame.side == Side::left) local.x() = -local.x();
    out.joints_local[i] = local;
  }
  return out;
}

}  // namespace graspkit
