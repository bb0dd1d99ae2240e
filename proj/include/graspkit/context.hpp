#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "graspkit/gesture.hpp"
#include "graspkit/scene.hpp"

namespace graspkit {

inline constexpr double kDefaultHoverRadius = 0.10;

/// Gestures currently eligible for recognition, keyed by the hovered object
/// that owns them. An object's gestures are registered iff it is hovered.
class ContextRegistry {
 public:
  explicit ContextRegistry(double hover_radius = kDefaultHoverRadius) : hover_radius_(hover_radius) {
    if (!(hover_radius > 0.0)) throw InvalidArgument("hover radius must be positive");
  }

  double hover_radius() const { return hover_radius_; }

  bool is_hovered(const ObjectId& id) const { return registered_.count(id) != 0; }

  const std::map<ObjectId, std::vector<GestureId>>& registered() const { return registered_; }

  /// Every registered gesture id, ascending and without duplicates.
  std::vector<GestureId> registered_gestures() const {
    std::vector<GestureId> ids;
    for (const auto& [object, gestures] : registered_) ids.insert(ids.end(), gestures.begin(), gestures.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  void register_object(const SceneObject& object) { registered_[object.id] = object.gestures; }
  void unregister_object(const ObjectId& id) { registered_.erase(id); }
  void clear() { registered_.clear(); }

 private:
  double hover_radius_;
  std::map<ObjectId, std::vector<GestureId>> registered_;
};

/// Distance from the closest hand joint to the object's bounding sphere surface.
/// Negative when a joint is inside the sphere.
inline double hover_distance(const HandFrame& frame, const SceneObject& object) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& j : frame.joints) best = std::min(best, (j - object.center()).norm());
  return best - object.bounding_radius;
}

struct HoverEvent {
  enum class Kind { hover, unhover };
  Kind kind;
  ObjectId object;
  double timestamp;
};

/// Edge-triggered hover tracking. Registration of hovered objects is refreshed
/// every frame so gestures attached while hovering become eligible immediately.
inline std::vector<HoverEvent> hover_update(const HandFrame& frame, std::span<SceneObject> objects,
                                            ContextRegistry& registry) {
  std::vector<HoverEvent> events;
  for (auto& object : objects) {
    const bool near = object.present && hover_distance(frame, object) <= registry.hover_radius();
    if (near) {
      registry.register_object(object);
      if (!object.hovered) {
        object.hovered = true;
        events.push_back({HoverEvent::Kind::hover, object.id, frame.timestamp});
      }
    } else {
      registry.unregister_object(object.id);
      if (object.hovered) {
        object.hovered = false;
        events.push_back({HoverEvent::Kind::unhover, object.id, frame.timestamp});
      }
    }
  }
  return events;
}

struct Match {
  GestureId id = 0;
  double score = 0.0;
};

/// Hover-gated nearest-template recognition. Only registered gestures of the
/// requested role are scored; the smallest S_g within threshold wins, ties go to
/// the lowest id.
inline std::optional<Match> recognize(const CanonicalHand& current, const ContextRegistry& registry,
                                      const TemplateStore& store, GestureRole role = GestureRole::grab) {
  std::optional<Match> best;
  for (GestureId id : registry.registered_gestures()) {
    const GestureTemplate* tmpl = store.find(id);
    if (tmpl == nullptr || tmpl->role != role) continue;
    const auto score = bounded_similarity(current, *tmpl);
    if (!score) continue;
    if (!best || *score < best->score) best = Match{id, *score};
  }
  return best;
}

}  // namespace graspkit
