#pragma once

#include <memory>
#include <span>
#include <vector>

#include "graspkit/context.hpp"
#include "graspkit/events.hpp"
#include "graspkit/grab.hpp"

namespace graspkit {

inline Event to_event(const HoverEvent& h) {
  return make_event(h.kind == HoverEvent::Kind::hover ? EventKind::hover : EventKind::unhover, h.timestamp,
                    h.object);
}

inline Event to_event(const GrabEvent& g, const TemplateStore& store) {
  const GestureTemplate* tmpl = store.find(g.gesture);
  Event e = make_event(g.kind == GrabEvent::Kind::grab ? EventKind::grab : EventKind::release, g.timestamp, g.object,
                       tmpl != nullptr ? tmpl->label() : std::to_string(g.gesture));
  e.score = g.score;
  return e;
}

/// Context-aware gesture recognition for one hand stream: hover tracking, gated
/// template matching and the grab/release state machine over a set of objects.
/// Single writer; the template store is a shared read-only snapshot.
class GestureEngine {
 public:
  GestureEngine(std::shared_ptr<const TemplateStore> store, double hover_radius = kDefaultHoverRadius,
                GrabParams params = {})
      : store_(std::move(store)), registry_(hover_radius), params_(params) {
    if (!store_) throw InvalidArgument("gesture engine needs a template store");
  }

  std::vector<Event> step(const HandFrame& frame, std::span<SceneObject> objects) {
    const CanonicalHand current = canonicalize(frame);
    std::vector<Event> out;
    for (const auto& h : hover_update(frame, objects, registry_)) out.push_back(to_event(h));
    last_match_ = recognize(current, registry_, *store_, GestureRole::grab);
    for (const auto& g : grab_release_step(state_, params_, frame, current, last_match_, *store_, objects)) {
      out.push_back(to_event(g, *store_));
      last_grab_event_ = g;
    }
    return out;
  }

  const ContextRegistry& registry() const { return registry_; }
  const GrabState& state() const { return state_; }
  const GrabParams& params() const { return params_; }
  const TemplateStore& store() const { return *store_; }
  const std::optional<Match>& last_match() const { return last_match_; }
  const std::optional<GrabEvent>& last_grab_event() const { return last_grab_event_; }

  /// Swap in a newer template snapshot (e.g. after a capture).
  void set_store(std::shared_ptr<const TemplateStore> store) {
    if (!store) throw InvalidArgument("gesture engine needs a template store");
    store_ = std::move(store);
  }

 private:
  std::shared_ptr<const TemplateStore> store_;
  ContextRegistry registry_;
  GrabParams params_;
  GrabState state_;
  std::optional<Match> last_match_;
  std::optional<GrabEvent> last_grab_event_;
};

}  // namespace graspkit
