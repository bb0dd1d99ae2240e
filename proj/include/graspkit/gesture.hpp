#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspkit/hand_model.hpp"

namespace graspkit {

using GestureId = std::uint32_t;
using ObjectId = std::string;

inline constexpr double kDefaultThresholdSum = 0.05;  // meters, summed over all joints

// Absorbs rounding in the joint sum so that a score landing on the threshold in exact
// arithmetic (e.g. 25 x 2 mm) still matches.
inline constexpr double kMatchSlack = 1e-12;

inline bool within_threshold(double score, double threshold) { return score <= threshold + kMatchSlack; }

enum class GestureRole : std::uint8_t { grab, release };

constexpr std::string_view to_string(GestureRole role) {
  return role == GestureRole::grab ? "grab" : "release";
}

/// A stored static hand shape in canonical coordinates.
struct GestureTemplate {
  GestureId id = 0;
  std::string name;
  ObjectId object_id;  // empty for generic gestures not captured on an object
  JointArray joints_local = zero_joints();
  double threshold_sum = kDefaultThresholdSum;
  GestureRole role = GestureRole::grab;

  std::string label() const { return name.empty() ? std::to_string(id) : name; }
};

/// Sum of per-joint Euclidean distances.
inline double similarity(const JointArray& a, const JointArray& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kJointCount; ++i) sum += (a[i] - b[i]).norm();
  return sum;
}

inline double similarity(const CanonicalHand& current, const GestureTemplate& tmpl) {
  return similarity(current.joints_local, tmpl.joints_local);
}

/// Score against a template's threshold, giving up as soon as one joint alone
/// exceeds it. Returns nullopt when the template does not match.
inline std::optional<double> bounded_similarity(const CanonicalHand& current,
                                                const GestureTemplate& tmpl) {
  const double tau = tmpl.threshold_sum;
  double sum = 0.0;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const double d = (current.joints_local[i] - tmpl.joints_local[i]).norm();
    if (!within_threshold(d, tau)) return std::nullopt;
    sum += d;
  }
  if (!within_threshold(sum, tau)) return std::nullopt;
  return sum;
}

/// Immutable, id-sorted template collection. Copies are cheap to share behind a
/// shared_ptr<const TemplateStore>; "modifying" returns a new snapshot.
class TemplateStore {
 public:
  TemplateStore() = default;

  explicit TemplateStore(std::vector<GestureTemplate> templates) : templates_(std::move(templates)) {
    std::sort(templates_.begin(), templates_.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < templates_.size(); ++i) {
      if (i > 0 && templates_[i].id == templates_[i - 1].id) {
        throw InvalidArgument("duplicate gesture id " + std::to_string(templates_[i].id));
      }
      if (!(templates_[i].threshold_sum > 0.0)) {
        throw InvalidArgument("gesture threshold must be positive");
      }
    }
  }

  const GestureTemplate* find(GestureId id) const {
    auto it = std::lower_bound(templates_.begin(), templates_.end(), id,
                               [](const GestureTemplate& t, GestureId v) { return t.id < v; });
    if (it == templates_.end() || it->id != id) return nullptr;
    return &*it;
  }

  std::span<const GestureTemplate> all() const { return templates_; }
  std::size_t size() const { return templates_.size(); }
  bool empty() const { return templates_.empty(); }

  GestureId next_id() const { return templates_.empty() ? 1 : templates_.back().id + 1; }

  TemplateStore with(GestureTemplate tmpl) const {
    auto copy = templates_;
    copy.push_back(std::move(tmpl));
    return TemplateStore(std::move(copy));
  }

 private:
  std::vector<GestureTemplate> templates_;
};

/// Build a template from a captured frame.
inline GestureTemplate make_template(const HandFrame& frame, GestureId id, std::string name,
                                     ObjectId object_id, GestureRole role = GestureRole::grab,
                                     double threshold_sum = kDefaultThresholdSum) {
  GestureTemplate out;
  out.id = id;
  out.name = std::move(name);
  out.object_id = std::move(object_id);
  out.joints_local = canonicalize(frame).joints_local;
  out.threshold_sum = threshold_sum;
  out.role = role;
  return out;
}

}  // namespace graspkit
