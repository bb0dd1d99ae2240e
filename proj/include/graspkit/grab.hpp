#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graspkit/context.hpp"
#include "graspkit/gesture.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/scene.hpp"

namespace graspkit {

enum class ReleasePolicy : std::uint8_t { template_match, deviation };

constexpr std::string_view to_string(ReleasePolicy p) {
  return p == ReleasePolicy::template_match ? "template" : "deviation";
}

struct GrabParams {
  ReleasePolicy policy = ReleasePolicy::deviation;
  double release_factor = 1.5;  // deviation: S_g > factor * threshold releases...
  double release_dwell = 0.1;   // ...once sustained this long (seconds)
};

struct GrabState {
  enum class Phase { idle, hovering, grabbed };
  Phase phase = Phase::idle;
  ObjectId object;           // hovered or grabbed object
  GestureId gesture = 0;     // grabbing template
  RigidTransform grab_offset;  // palm -> object, fixed for the grab
  double grab_time = 0.0;
  std::optional<double> deviation_since;
  bool armed = true;  // a new grab needs one frame without a grab match after a release
};

struct GrabEvent {
  enum class Kind { grab, release };
  Kind kind;
  ObjectId object;
  GestureId gesture;
  double score;
  double timestamp;
};

/// Closest hovered, present object, optionally restricted to those carrying `gesture`.
inline SceneObject* nearest_hovered(const HandFrame& frame, std::span<SceneObject> objects,
                                    std::optional<GestureId> gesture = std::nullopt) {
  SceneObject* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto& o : objects) {
    if (!o.present || !o.hovered) continue;
    if (gesture && !o.has_gesture(*gesture)) continue;
    const double d = hover_distance(frame, o);
    if (d < best_d) {
      best_d = d;
      best = &o;
    }
  }
  return best;
}

inline SceneObject* find_object(std::span<SceneObject> objects, const ObjectId& id) {
  for (auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

/// Rigidly attach `object` to the palm.
inline void begin_grab(GrabState& gs, SceneObject& object, const RigidTransform& palm, GestureId gesture,
                       double t) {
  gs.phase = GrabState::Phase::grabbed;
  gs.object = object.id;
  gs.gesture = gesture;
  gs.grab_offset = palm.inverse() * object.pose;
  gs.grab_time = t;
  gs.deviation_since.reset();
  object.grabbed = true;
}

inline void end_grab(GrabState& gs, SceneObject* object) {
  if (object != nullptr) object->grabbed = false;
  gs.phase = GrabState::Phase::idle;
  gs.deviation_since.reset();
  gs.armed = false;
}

/// Recompute the hovering/idle phase when nothing is held.
inline void refresh_hover_phase(GrabState& gs, const HandFrame& frame, std::span<SceneObject> objects) {
  if (gs.phase == GrabState::Phase::grabbed) return;
  if (SceneObject* h = nearest_hovered(frame, objects)) {
    gs.phase = GrabState::Phase::hovering;
    gs.object = h->id;
  } else {
    gs.phase = GrabState::Phase::idle;
    gs.object.clear();
  }
}

/// One frame of the template-driven grab/release state machine.
///
/// `grab_match` is the hover-gated recognition result for grab-role templates. While
/// an object is held it follows the palm rigidly; the pose is updated before release
/// is evaluated, so a released object rests where the hand left it.
inline std::vector<GrabEvent> grab_release_step(GrabState& gs, const GrabParams& params, const HandFrame& frame,
                                                const CanonicalHand& current, std::optional<Match> grab_match,
                                                const TemplateStore& store, std::span<SceneObject> objects) {
  std::vector<GrabEvent> events;
  const RigidTransform palm = palm_frame(frame);
  const double t = frame.timestamp;

  if (gs.phase == GrabState::Phase::grabbed) {
    SceneObject* held = find_object(objects, gs.object);
    if (held == nullptr || !held->present) {
      end_grab(gs, held);
      refresh_hover_phase(gs, frame, objects);
      return events;
    }
    held->pose = palm * gs.grab_offset;

    std::optional<GrabEvent> release;
    if (params.policy == ReleasePolicy::deviation) {
      const GestureTemplate* tmpl = store.find(gs.gesture);
      const double score = tmpl != nullptr ? similarity(current, *tmpl) : std::numeric_limits<double>::infinity();
      const double limit = params.release_factor * (tmpl != nullptr ? tmpl->threshold_sum : kDefaultThresholdSum);
      if (score > limit) {
        if (!gs.deviation_since) gs.deviation_since = t;
        constexpr double kTimeEpsilon = 1e-9;
        if (t - *gs.deviation_since + kTimeEpsilon >= params.release_dwell) {
          release = GrabEvent{GrabEvent::Kind::release, held->id, gs.gesture, score, t};
        }
      } else {
        gs.deviation_since.reset();
      }
    } else {
      std::optional<Match> best;
      for (GestureId id : held->gestures) {
        const GestureTemplate* tmpl = store.find(id);
        if (tmpl == nullptr || tmpl->role != GestureRole::release) continue;
        const auto score = bounded_similarity(current, *tmpl);
        if (!score) continue;
        if (!best || *score < best->score || (*score == best->score && id < best->id)) best = Match{id, *score};
      }
      if (best) release = GrabEvent{GrabEvent::Kind::release, held->id, best->id, best->score, t};
    }

    if (release) {
      events.push_back(*release);
      end_grab(gs, held);
      refresh_hover_phase(gs, frame, objects);
    }
    return events;
  }

  if (!gs.armed && !grab_match) gs.armed = true;
  if (gs.armed && grab_match) {
    if (SceneObject* target = nearest_hovered(frame, objects, grab_match->id)) {
      begin_grab(gs, *target, palm, grab_match->id, t);
      events.push_back({GrabEvent::Kind::grab, target->id, grab_match->id, grab_match->score, t});
      return events;
    }
  }
  refresh_hover_phase(gs, frame, objects);
  return events;
}

}  // namespace graspkit
