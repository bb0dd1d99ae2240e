#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <variant>

#include "graspkit/context.hpp"
#include "graspkit/gesture.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/scene.hpp"

namespace graspkit {

enum class Stillness { still, moved };

/// Sliding window over the palm (wrist) and the five fingertips. A frame counts as
/// movement when any tracked point is farther than `tolerance` from where it was at
/// the start of the window; movement restarts the window at that frame.
class StillnessWindow {
 public:
  static constexpr std::size_t kTrackedPoints = 6;
  using Points = std::array<Vec3, kTrackedPoints>;

  explicit StillnessWindow(double tolerance = 0.01, std::size_t capacity = 10)
      : tolerance_(tolerance), capacity_(capacity) {
    if (!(tolerance > 0.0)) throw InvalidArgument("stillness tolerance must be positive");
    if (capacity < 2) throw InvalidArgument("stillness window needs at least two frames");
  }

  Stillness update(const HandFrame& frame) {
    const Points points = tracked(frame);
    if (!window_.empty()) {
      const Points& start = window_.front();
      for (std::size_t i = 0; i < kTrackedPoints; ++i) {
        if ((points[i] - start[i]).norm() > tolerance_) {
          window_.clear();
          window_.push_back(points);
          return Stillness::moved;
        }
      }
    }
    window_.push_back(points);
    if (window_.size() > capacity_) window_.pop_front();
    return Stillness::still;
  }

  void reset() { window_.clear(); }
  std::size_t size() const { return window_.size(); }
  std::size_t capacity() const { return capacity_; }
  double tolerance() const { return tolerance_; }

  static Points tracked(const HandFrame& frame) {
    Points p;
    p[0] = frame.joint(JointId::Wrist);
    for (std::size_t i = 0; i < kFingertips.size(); ++i) p[i + 1] = frame.joint(kFingertips[i]);
    return p;
  }

 private:
  double tolerance_;
  std::size_t capacity_;
  std::deque<Points> window_;
};

enum class CaptureState { idle, holding, captured, aborted };

constexpr std::string_view to_string(CaptureState s) {
  switch (s) {
    case CaptureState::idle: return "idle";
    case CaptureState::holding: return "holding";
    case CaptureState::captured: return "captured";
    case CaptureState::aborted: return "aborted";
  }
  return "?";
}

struct CaptureParams {
  double hold_required = 3.0;       // seconds of continuous stillness
  double hand_lost_timeout = 0.5;   // max gap between frames
  double hover_radius = kDefaultHoverRadius;
  double stillness_tolerance = 0.01;
  std::size_t stillness_frames = 10;
  GestureId template_id = 1;
  std::string template_name;        // defaults to "<object>_grasp"
  GestureRole role = GestureRole::grab;
  double threshold_sum = kDefaultThresholdSum;
};

struct CaptureProgress {
  CaptureState state;
  double progress;
};

using CaptureResult = std::variant<CaptureProgress, GestureTemplate>;

/// Hold-still authoring of one gesture on one object.
class CaptureSession {
 public:
  explicit CaptureSession(ObjectId target_object, CaptureParams params = {})
      : target_(std::move(target_object)),
        params_(std::move(params)),
        stillness_(params_.stillness_tolerance, params_.stillness_frames) {
    if (!(params_.hold_required > 0.0)) throw InvalidArgument("hold time must be positive");
  }

  const ObjectId& target_object() const { return target_; }
  const CaptureParams& params() const { return params_; }
  CaptureState state() const { return state_; }
  double progress() const { return progress_; }

  /// Back to idle after an abort or a completed capture.
  void reset() {
    state_ = CaptureState::idle;
    progress_ = 0.0;
    run_start_.reset();
    last_timestamp_.reset();
    stillness_.reset();
  }

 private:
  friend CaptureResult capture_step(CaptureSession&, const HandFrame&, SceneObject&);

  void to_idle() {
    state_ = CaptureState::idle;
    progress_ = 0.0;
  }

  ObjectId target_;
  CaptureParams params_;
  StillnessWindow stillness_;
  CaptureState state_ = CaptureState::idle;
  double progress_ = 0.0;
  std::optional<double> run_start_;  // timestamp at which the current still run began
  std::optional<double> last_timestamp_;
};

/// Advance a capture session by one frame. Progress is the time since the start of
/// the current uninterrupted still-and-hovering run over the required hold time.
/// On completion the canonicalized frame becomes a template attached to `object`.
inline CaptureResult capture_step(CaptureSession& session, const HandFrame& frame, SceneObject& object) {
  if (session.state_ == CaptureState::captured || session.state_ == CaptureState::aborted) {
    throw InvalidState("capture session already finished; reset() it first");
  }
  if (object.id != session.target_) {
    throw InvalidArgument("capture frame routed to object '" + object.id + "' but session targets '" +
                          session.target_ + "'");
  }
  if (session.last_timestamp_ && frame.timestamp - *session.last_timestamp_ > session.params_.hand_lost_timeout) {
    session.state_ = CaptureState::aborted;
    session.progress_ = 0.0;
    throw HandLost("no hand frame for " + std::to_string(frame.timestamp - *session.last_timestamp_) + " s");
  }
  session.last_timestamp_ = frame.timestamp;

  const bool hovering = object.present && hover_distance(frame, object) <= session.params_.hover_radius;
  if (!hovering) {
    session.stillness_.reset();
    session.run_start_.reset();
    session.to_idle();
    return CaptureProgress{session.state_, session.progress_};
  }

  const Stillness still = session.stillness_.update(frame);
  if (still == Stillness::moved || !session.run_start_) {
    // This frame starts a new window, and with it a new still run.
    session.run_start_ = frame.timestamp;
    if (still == Stillness::moved) {
      session.to_idle();
      return CaptureProgress{session.state_, session.progress_};
    }
  }

  session.state_ = CaptureState::holding;
  const double elapsed = frame.timestamp - *session.run_start_;
  // Tolerate accumulated rounding in stream timestamps (e.g. k / 90.0).
  constexpr double kTimeEpsilon = 1e-9;
  if (elapsed + kTimeEpsilon >= session.params_.hold_required) {
    session.progress_ = 1.0;
    session.state_ = CaptureState::captured;
    const auto& p = session.params_;
    GestureTemplate tmpl = make_template(frame, p.template_id,
                                         p.template_name.empty() ? object.id + "_grasp" : p.template_name,
                                         object.id, p.role, p.threshold_sum);
    object.attach(tmpl.id);
    return tmpl;
  }
  session.progress_ = std::clamp(elapsed / session.params_.hold_required, 0.0, 1.0);
  return CaptureProgress{session.state_, session.progress_};
}

}  // namespace graspkit
