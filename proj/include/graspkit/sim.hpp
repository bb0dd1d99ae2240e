#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspkit/context.hpp"
#include "graspkit/engine.hpp"
#include "graspkit/events.hpp"
#include "graspkit/grab.hpp"
#include "graspkit/pinch.hpp"
#include "graspkit/scene.hpp"
#include "graspkit/stats.hpp"

namespace graspkit {

enum class Technique : std::uint8_t { controller, pinch, grab, custom };

constexpr std::string_view to_string(Technique t) {
  switch (t) {
    case Technique::controller: return "controller";
    case Technique::pinch: return "pinch";
    case Technique::grab: return "grab";
    case Technique::custom: return "custom";
  }
  return "?";
}

inline std::optional<Technique> parse_technique(std::string_view s) {
  if (s == "controller") return Technique::controller;
  if (s == "pinch") return Technique::pinch;
  if (s == "grab") return Technique::grab;
  if (s == "custom") return Technique::custom;
  return std::nullopt;
}

enum class ColorBand : std::uint8_t { green, yellow, red };

constexpr std::string_view to_string(ColorBand b) {
  switch (b) {
    case ColorBand::green: return "green";
    case ColorBand::yellow: return "yellow";
    case ColorBand::red: return "red";
  }
  return "?";
}

/// Target feedback radii (meters): green below `green_below`, yellow below `yellow_below`.
struct ColorBands {
  double green_below = 0.02;
  double yellow_below = 0.05;
};

inline ColorBand color_band(double distance, const ColorBands& bands = {}) {
  if (distance < bands.green_below) return ColorBand::green;
  if (distance < bands.yellow_below) return ColorBand::yellow;
  return ColorBand::red;
}

struct TrialResult {
  Technique technique = Technique::custom;
  ObjectId object_id;
  double accuracy = 0.0;  // object center -> target center at release, meters
  double tct = 0.0;       // release - grab, seconds
  bool dropped = false;
  ColorBand band = ColorBand::green;
};

struct ReachBox {
  Vec3 min = Vec3(-0.3, 1.0, 0.35);
  Vec3 max = Vec3(0.3, 1.3, 0.6);
};

struct ProtocolParams {
  std::size_t repetitions = 3;     // placements per object
  Vec3 first_target = Vec3(0.0, 1.1, 0.45);
  double target_diameter = 0.5;
  ReachBox reach;
  std::uint64_t seed = 1;
  double placement_delay = 1.0;    // placed object disappears after this long
};

/// Scene description: objects in spawn pose with their object-specific gestures,
/// plus generic gestures attached to every object under the Grab technique.
struct SceneConfig {
  std::string scene_id = "default";
  double hover_radius = kDefaultHoverRadius;
  std::vector<SceneObject> objects;
  std::vector<GestureId> generic_gestures;
  ProtocolParams protocol;
  ColorBands bands;
  std::optional<ReleasePolicy> release_policy;  // default: template for grab, deviation for custom
};

struct Scene {
  SceneConfig config;
  std::shared_ptr<const TemplateStore> templates = std::make_shared<const TemplateStore>();
};

inline ReleasePolicy release_policy_for(const SceneConfig& config, Technique t) {
  if (config.release_policy) return *config.release_policy;
  return t == Technique::grab ? ReleasePolicy::template_match : ReleasePolicy::deviation;
}

/// Seeded target positions: the configured first target, then uniform draws in
/// the reach box. Uses raw 64-bit draws so sequences match across standard libraries.
class TargetSequence {
 public:
  explicit TargetSequence(const ProtocolParams& p) : params_(p), rng_(p.seed) {}

  Vec3 next() {
    if (first_) {
      first_ = false;
      return params_.first_target;
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      v[i] = params_.reach.min[i] + u * (params_.reach.max[i] - params_.reach.min[i]);
    }
    return v;
  }

 private:
  ProtocolParams params_;
  std::mt19937_64 rng_;
  bool first_ = true;
};

/// Object order of a run: each object `repetitions` times in a row.
inline std::vector<std::size_t> trial_order(const SceneConfig& config) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < config.objects.size(); ++i) {
    for (std::size_t r = 0; r < config.protocol.repetitions; ++r) order.push_back(i);
  }
  return order;
}

struct TechniqueSummary {
  Technique technique = Technique::custom;
  std::size_t placements = 0;
  std::size_t drops = 0;
  double accuracy_mean = std::numeric_limits<double>::quiet_NaN();
  double accuracy_sd = std::numeric_limits<double>::quiet_NaN();
  double tct_mean = std::numeric_limits<double>::quiet_NaN();
  double tct_sd = std::numeric_limits<double>::quiet_NaN();
  bool complete = false;
};

/// Placement statistics; dropped releases only count towards `drops`.
inline TechniqueSummary summarize(Technique technique, std::span<const TrialResult> results, bool complete) {
  TechniqueSummary s;
  s.technique = technique;
  s.complete = complete;
  std::vector<double> acc, tct;
  for (const auto& r : results) {
    if (r.dropped) {
      ++s.drops;
    } else {
      ++s.placements;
      acc.push_back(r.accuracy);
      tct.push_back(r.tct);
    }
  }
  if (!acc.empty()) {
    const auto a = stats::descriptive(acc);
    const auto t = stats::descriptive(tct);
    s.accuracy_mean = a.mean;
    s.accuracy_sd = a.sd;
    s.tct_mean = t.mean;
    s.tct_sd = t.sd;
  }
  return s;
}

inline std::string format_summary(const TechniqueSummary& s) {
  return "summary " + std::string(to_string(s.technique)) + " placements=" + std::to_string(s.placements) +
         " drops=" + std::to_string(s.drops) + " accuracy_mean=" + format_number(s.accuracy_mean) +
         " accuracy_sd=" + format_number(s.accuracy_sd) + " tct_mean=" + format_number(s.tct_mean) +
         " tct_sd=" + format_number(s.tct_sd) + " complete=" + (s.complete ? "1" : "0");
}

/// Grab-and-place protocol driven by a hand frame stream.
///
/// One object is present at a time. A release inside the target sphere is a
/// placement: the object is removed and the next trial starts `placement_delay`
/// seconds later with the target moved. A release outside is a drop; the object
/// stays where it fell and can be grabbed again.
class InteractionSimulator {
 public:
  InteractionSimulator(Scene scene, Technique technique)
      : scene_(std::move(scene)),
        technique_(technique),
        objects_(scene_.config.objects),
        spawn_poses_(),
        order_(trial_order(scene_.config)),
        targets_(scene_.config.protocol),
        registry_(scene_.config.hover_radius),
        grab_params_{release_policy_for(scene_.config, technique)} {
    if (order_.empty()) throw InvalidArgument("scene has no objects to place");
    if (!(scene_.config.protocol.target_diameter > 0.0)) throw InvalidArgument("target diameter must be positive");
    for (auto& o : objects_) {
      if (!(o.bounding_radius > 0.0)) throw InvalidArgument("object '" + o.id + "' needs a positive radius");
      spawn_poses_.push_back(o.pose);
      if (technique_ == Technique::grab) o.gestures = scene_.config.generic_gestures;
      if (technique_ == Technique::controller || technique_ == Technique::pinch) o.gestures.clear();
      o.present = false;
      o.hovered = false;
      o.grabbed = false;
    }
    target_.diameter = scene_.config.protocol.target_diameter;
    start_trial(0);
  }

  /// Process one frame; returns the events it caused in order.
  std::vector<Event> step(const HandFrame& frame) {
    if (finished_) throw ProtocolViolation("frame at t=" + format_number(frame.timestamp) + " after the run finished");
    if (last_t_ && frame.timestamp < *last_t_) {
      throw ProtocolViolation("frame timestamps went backwards at t=" + format_number(frame.timestamp));
    }

    // Reject a degenerate hand before any state changes.
    std::optional<CanonicalHand> current;
    if (technique_ == Technique::grab || technique_ == Technique::custom) {
      current = canonicalize(frame);
    } else {
      palm_frame(frame);
    }
    last_t_ = frame.timestamp;

    std::vector<Event> events;
    if (next_trial_at_ && frame.timestamp >= *next_trial_at_) {
      next_trial_at_.reset();
      start_trial(trial_ + 1);
    }

    for (const auto& h : hover_update(frame, objects_, registry_)) events.push_back(to_event(h));

    switch (technique_) {
      case Technique::controller: step_controller(frame, events); break;
      case Technique::pinch: step_pinch(frame, events); break;
      case Technique::grab:
      case Technique::custom: step_gesture(frame, *current, events); break;
    }
    return events;
  }

  bool finished() const { return finished_; }
  Technique technique() const { return technique_; }
  const std::vector<TrialResult>& results() const { return results_; }
  std::size_t placements() const { return placements_; }
  std::size_t total_trials() const { return order_.size(); }
  std::size_t trial_index() const { return trial_; }
  const TargetSphere& target() const { return target_; }
  const SceneObject& active_object() const { return objects_[order_[trial_]]; }
  std::size_t active_object_index() const { return order_[trial_]; }
  const std::vector<SceneObject>& objects() const { return objects_; }
  const GrabState& grab_state() const { return grab_; }
  const Scene& scene() const { return scene_; }

  TechniqueSummary summary() const { return summarize(technique_, results_, finished_); }

 private:
  void start_trial(std::size_t k) {
    for (auto& o : objects_) o.present = false;
    trial_ = k;
    SceneObject& obj = objects_[order_[k]];
    obj.pose = spawn_poses_[order_[k]];
    obj.present = true;
    obj.grabbed = false;
    target_.center = targets_.next();
  }

  void step_controller(const HandFrame& frame, std::vector<Event>& events) {
    const bool grip = frame.grip.value_or(false);
    const bool rising = grip && !grip_;
    const bool falling = !grip && grip_;
    grip_ = grip;
    manual_step(frame, rising, falling, "grip", events);
  }

  void step_pinch(const HandFrame& frame, std::vector<Event>& events) {
    const auto ev = pinch_update(pinch_, frame);
    if (ev) {
      events.push_back(
          make_event(*ev == PinchEvent::start ? EventKind::pinch_start : EventKind::pinch_end, frame.timestamp));
    }
    manual_step(frame, ev == PinchEvent::start, ev == PinchEvent::end, "pinch", events);
  }

  // Edge-triggered grab/release for the controller and pinch techniques.
  void manual_step(const HandFrame& frame, bool start, bool end, const std::string& label,
                   std::vector<Event>& events) {
    const double t = frame.timestamp;
    if (grab_.phase == GrabState::Phase::grabbed) {
      SceneObject* held = find_object(std::span<SceneObject>(objects_), grab_.object);
      const RigidTransform palm = palm_frame(frame);
      held->pose = palm * grab_.grab_offset;
      if (end) {
        events.push_back(make_event(EventKind::release, t, held->id, label));
        end_grab(grab_, held);
        finish_release(*held, t, events);
      }
    } else if (start) {
      if (SceneObject* target = nearest_hovered(frame, objects_)) {
        begin_grab(grab_, *target, palm_frame(frame), 0, t);
        events.push_back(make_event(EventKind::grab, t, target->id, label));
      }
    }
    refresh_hover_phase(grab_, frame, objects_);
  }

  void step_gesture(const HandFrame& frame, const CanonicalHand& current, std::vector<Event>& events) {
    const TemplateStore& store = *scene_.templates;
    const auto match = recognize(current, registry_, store, GestureRole::grab);
    for (const auto& g : grab_release_step(grab_, grab_params_, frame, current, match, store, objects_)) {
      events.push_back(to_event(g, store));
      if (g.kind == GrabEvent::Kind::release) {
        SceneObject* obj = find_object(std::span<SceneObject>(objects_), g.object);
        finish_release(*obj, g.timestamp, events);
      }
    }
  }

  void finish_release(SceneObject& obj, double t, std::vector<Event>& events) {
    TrialResult r;
    r.technique = technique_;
    r.object_id = obj.id;
    r.accuracy = (obj.center() - target_.center).norm();
    r.tct = t - grab_.grab_time;
    r.band = color_band(r.accuracy, scene_.config.bands);
    r.dropped = !target_.contains(obj.center());
    results_.push_back(r);

    Event e = make_event(r.dropped ? EventKind::dropped : EventKind::placed, t, obj.id);
    e.accuracy = r.accuracy;
    events.push_back(e);

    if (!r.dropped) {
      obj.present = false;
      ++placements_;
      if (placements_ == order_.size()) {
        finished_ = true;
      } else {
        next_trial_at_ = t + scene_.config.protocol.placement_delay;
      }
    }
  }

  Scene scene_;
  Technique technique_;
  std::vector<SceneObject> objects_;
  std::vector<RigidTransform> spawn_poses_;
  std::vector<std::size_t> order_;
  TargetSequence targets_;
  ContextRegistry registry_;
  GrabParams grab_params_;
  GrabState grab_;
  PinchState pinch_;
  bool grip_ = false;

  TargetSphere target_;
  std::size_t trial_ = 0;
  std::size_t placements_ = 0;
  std::optional<double> next_trial_at_;
  std::optional<double> last_t_;
  bool finished_ = false;
  std::vector<TrialResult> results_;
};

struct RunReport {
  Technique technique = Technique::custom;
  std::vector<TrialResult> results;
  TechniqueSummary summary;
  std::vector<Event> events;
  bool complete = false;
};

/// The stream ended before every placement was made. Carries the partial report.
class IncompleteRun : public Error {
 public:
  explicit IncompleteRun(RunReport partial)
      : Error("stream ended after " + std::to_string(partial.summary.placements) + " placements"),
        partial_(std::move(partial)) {}
  const RunReport& partial() const { return partial_; }

 private:
  RunReport partial_;
};

/// Replay a whole stream through a fresh simulator. A frame after the final
/// placement is a ProtocolViolation.
inline RunReport run_replay(const Scene& scene, std::span<const HandFrame> frames, Technique technique) {
  InteractionSimulator sim(scene, technique);
  RunReport report;
  report.technique = technique;
  for (const auto& f : frames) {
    auto ev = sim.step(f);
    report.events.insert(report.events.end(), ev.begin(), ev.end());
  }
  report.results = sim.results();
  report.summary = sim.summary();
  report.complete = sim.finished();
  if (!report.complete) throw IncompleteRun(std::move(report));
  return report;
}

}  // namespace graspkit
