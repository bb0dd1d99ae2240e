#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace graspkit {

enum class EventKind { hover, unhover, grab, release, pinch_start, pinch_end, placed, dropped };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::hover: return "hover";
    case EventKind::unhover: return "unhover";
    case EventKind::grab: return "grab";
    case EventKind::release: return "release";
    case EventKind::pinch_start: return "pinch-start";
    case EventKind::pinch_end: return "pinch-end";
    case EventKind::placed: return "placed";
    case EventKind::dropped: return "dropped";
  }
  return "?";
}

/// One interaction event. `gesture`/`score` are set for grab and release,
/// `accuracy` for placed and dropped.
struct Event {
  EventKind kind = EventKind::hover;
  double timestamp = 0.0;
  std::string object;
  std::string gesture;
  std::optional<double> score;
  double accuracy = 0.0;

  bool operator==(const Event&) const = default;
};

inline Event make_event(EventKind kind, double timestamp, std::string object = {}, std::string gesture = {}) {
  Event e;
  e.kind = kind;
  e.timestamp = timestamp;
  e.object = std::move(object);
  e.gesture = std::move(gesture);
  return e;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Text form shared by the CLI event log and the streaming service:
///   hover <object> <t>            unhover <object> <t>
///   grab <object> <gesture> <S_g|-> <t>
///   release <object> <gesture> <S_g|-> <t>
///   pinch-start <t>               pinch-end <t>
///   placed <object> <accuracy_m> <t>
///   dropped <object> <accuracy_m> <t>
inline std::string format_event(const Event& e) {
  std::string out(to_string(e.kind));
  switch (e.kind) {
    case EventKind::hover:
    case EventKind::unhover:
      out += ' ' + e.object;
      break;
    case EventKind::grab:
    case EventKind::release:
      out += ' ' + e.object + ' ' + e.gesture + ' ' + (e.score ? format_number(*e.score) : std::string("-"));
      break;
    case EventKind::pinch_start:
    case EventKind::pinch_end:
      break;
    case EventKind::placed:
    case EventKind::dropped:
      out += ' ' + e.object + ' ' + format_number(e.accuracy);
      break;
  }
  out += ' ' + format_number(e.timestamp);
  return out;
}

}  // namespace graspkit
