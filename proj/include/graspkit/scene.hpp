#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "graspkit/gesture.hpp"
#include "graspkit/hand_model.hpp"

namespace graspkit {

/// A graspable object, represented by its pose and a bounding sphere.
struct SceneObject {
  ObjectId id;
  RigidTransform pose;
  double bounding_radius = 0.05;
  std::vector<GestureId> gestures;  // attached templates
  bool hovered = false;
  bool grabbed = false;
  bool present = true;  // false once placed (or not yet spawned)

  const Vec3& center() const { return pose.translation; }

  void attach(GestureId id) {
    if (std::find(gestures.begin(), gestures.end(), id) == gestures.end()) gestures.push_back(id);
  }
  bool has_gesture(GestureId id) const {
    return std::find(gestures.begin(), gestures.end(), id) != gestures.end();
  }
};

/// Put an object back at its initial pose and drop every attached gesture.
inline void reset_object(SceneObject& object, const RigidTransform& initial_pose) {
  object.pose = initial_pose;
  object.gestures.clear();
  object.grabbed = false;
}

struct TargetSphere {
  Vec3 center = Vec3::Zero();
  double diameter = 0.5;
  bool visible_center_marker = true;

  double radius() const { return diameter * 0.5; }
  bool contains(const Vec3& p) const { return (p - center).norm() <= radius(); }
};

}  // namespace graspkit
