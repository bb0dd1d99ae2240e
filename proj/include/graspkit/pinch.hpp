#pragma once

#include <optional>

#include "graspkit/error.hpp"
#include "graspkit/hand_model.hpp"

namespace graspkit {

enum class PinchEvent { start, end };

/// Debounced thumb-index pinch. The published state only adopts the raw reading
/// after the raw reading has stayed constant for `dwell` seconds.
struct PinchState {
  bool pinching = false;
  bool candidate = false;
  double candidate_since = 0.0;
  double threshold = 0.03;  // meters, strict
  double dwell = 0.1;       // seconds
  bool started = false;     // candidate_since is valid
};

inline bool raw_pinch(const HandFrame& frame, double threshold) {
  return (frame.joint(JointId::ThumbTip) - frame.joint(JointId::IndexTip)).norm() < threshold;
}

inline std::optional<PinchEvent> pinch_update(PinchState& ps, const HandFrame& frame) {
  const bool raw = raw_pinch(frame, ps.threshold);
  if (!ps.started || raw != ps.candidate) {
    ps.started = true;
    ps.candidate = raw;
    ps.candidate_since = frame.timestamp;
  }
  constexpr double kTimeEpsilon = 1e-9;
  if (ps.candidate != ps.pinching && frame.timestamp - ps.candidate_since + kTimeEpsilon >= ps.dwell) {
    ps.pinching = ps.candidate;
    return ps.pinching ? PinchEvent::start : PinchEvent::end;
  }
  return std::nullopt;
}

}  // namespace graspkit
