#pragma once

// File formats. All units are meters and seconds.
//
//   .frames   one JSON object per line:
//             {"t":0.0,"hand":"right","joints":[[x,y,z] x25],"grip":1}
//             "grip" is optional (controller streams). Timestamps are non-decreasing.
//   .gesture  one JSON object:
//             {"format_version":1,"name":..,"object_id":..,"role":"grab"|"release",
//              "threshold_sum":0.05,"joints_local":[[x,y,z] x25]}
//   scene     JSON, see load_scene().
//   results   CSV "technique,object,accuracy_m,tct_s,dropped,band" followed by
//             "# summary ..." lines.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/gesture.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/sim.hpp"

namespace graspkit::io {

inline constexpr int kTemplateFormatVersion = 1;
inline constexpr int kSceneFormatVersion = 1;

/// Malformed input. `line` is 1-based (0 when not line oriented), `field` a JSON-ish path.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error(describe(line, field, what)), line_(line), field_(std::move(field)) {}
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string describe(std::size_t line, const std::string& field, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += field + ": ";
    return out + what;
  }
  std::size_t line_;
  std::string field_;
};

/// A joints array of the wrong length.
class CountError : public ParseError {
 public:
  CountError(std::size_t line, std::size_t got)
      : ParseError(line, "joints", "expected 25 joints, got " + std::to_string(got)), count_(got) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline double number_at(const nlohmann::json& j, std::size_t line, const std::string& field) {
  if (!j.is_number()) throw ParseError(line, field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(line, field, "value is not finite");
  return v;
}

inline Vec3 vec3_at(const nlohmann::json& j, std::size_t line, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ParseError(line, field, "expected [x, y, z]");
  return {number_at(j[0], line, field + "[0]"), number_at(j[1], line, field + "[1]"),
          number_at(j[2], line, field + "[2]")};
}

inline JointArray joints_at(const nlohmann::json& j, std::size_t line, const std::string& field) {
  if (!j.is_array()) throw ParseError(line, field, "expected an array of joints");
  if (j.size() != kJointCount) throw CountError(line, j.size());
  JointArray out;
  for (std::size_t i = 0; i < kJointCount; ++i) out[i] = vec3_at(j[i], line, field + "[" + std::to_string(i) + "]");
  return out;
}

inline nlohmann::ordered_json joints_json(const JointArray& joints) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : joints) arr.push_back({p.x(), p.y(), p.z()});
  return arr;
}

inline nlohmann::json parse_json(std::string_view text, std::size_t line) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, "", std::string("invalid JSON: ") + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frames

/// Parse one frame record. Unknown keys are reported through `warnings`.
inline HandFrame parse_frame_line(std::string_view line, std::size_t line_no = 0,
                                  std::vector<std::string>* warnings = nullptr) {
  const nlohmann::json j = detail::parse_json(line, line_no);
  if (!j.is_object()) throw ParseError(line_no, "", "expected a JSON object");
  HandFrame frame;
  for (const auto& [key, value] : j.items()) {
    if (key == "t") {
      frame.timestamp = detail::number_at(value, line_no, "t");
    } else if (key == "hand") {
      if (value == "left") {
        frame.side = Side::left;
      } else if (value == "right") {
        frame.side = Side::right;
      } else {
        throw ParseError(line_no, "hand", "expected \"left\" or \"right\"");
      }
    } else if (key == "joints") {
      frame.joints = detail::joints_at(value, line_no, "joints");
    } else if (key == "grip") {
      if (value == 0 || value == false) {
        frame.grip = false;
      } else if (value == 1 || value == true) {
        frame.grip = true;
      } else {
        throw ParseError(line_no, "grip", "expected 0 or 1");
      }
    } else if (warnings != nullptr) {
      warnings->push_back((line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string()) +
                          "ignoring unknown field '" + key + "'");
    }
  }
  if (!j.contains("t")) throw ParseError(line_no, "t", "missing");
  if (!j.contains("hand")) throw ParseError(line_no, "hand", "missing");
  if (!j.contains("joints")) throw ParseError(line_no, "joints", "missing");
  return frame;
}

/// Canonical single-line encoding (shortest round-trip doubles, fixed key order).
inline std::string format_frame_line(const HandFrame& frame) {
  nlohmann::ordered_json j;
  j["t"] = frame.timestamp;
  j["hand"] = std::string(to_string(frame.side));
  j["joints"] = detail::joints_json(frame.joints);
  if (frame.grip) j["grip"] = *frame.grip ? 1 : 0;
  return j.dump();
}

/// Read a whole stream. Blank lines are skipped; timestamps must not decrease.
inline std::vector<HandFrame> read_frames(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  std::vector<HandFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    HandFrame f = parse_frame_line(line, line_no, warnings);
    if (!frames.empty() && f.timestamp < frames.back().timestamp) {
      throw ParseError(line_no, "t", "timestamp decreases");
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

inline std::vector<HandFrame> read_frames(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_frames(in, warnings);
}

inline void write_frames(std::ostream& out, std::span<const HandFrame> frames) {
  for (const auto& f : frames) out << format_frame_line(f) << '\n';
}

inline void write_frames(const std::filesystem::path& path, std::span<const HandFrame> frames) {
  std::ostringstream ss;
  write_frames(ss, frames);
  detail::write_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// Gesture templates

inline GestureTemplate parse_template(std::string_view text, GestureId id = 0) {
  const nlohmann::json j = detail::parse_json(text, 0);
  if (!j.is_object()) throw ParseError(0, "", "expected a JSON object");
  const auto require = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ParseError(0, key, "missing");
    return j.at(key);
  };
  const auto& version = require("format_version");
  if (!version.is_number_integer()) throw ParseError(0, "format_version", "expected an integer");
  if (version.get<int>() > kTemplateFormatVersion) {
    throw ParseError(0, "format_version", "unsupported version " + std::to_string(version.get<int>()));
  }
  GestureTemplate t;
  t.id = id;
  const auto& name = require("name");
  if (!name.is_string()) throw ParseError(0, "name", "expected a string");
  t.name = name.get<std::string>();
  const auto& object = require("object_id");
  if (!object.is_string()) throw ParseError(0, "object_id", "expected a string");
  t.object_id = object.get<std::string>();
  const auto& role = require("role");
  if (role == "grab") {
    t.role = GestureRole::grab;
  } else if (role == "release") {
    t.role = GestureRole::release;
  } else {
    throw ParseError(0, "role", "expected \"grab\" or \"release\"");
  }
  t.threshold_sum = detail::number_at(require("threshold_sum"), 0, "threshold_sum");
  if (!(t.threshold_sum > 0.0)) throw ParseError(0, "threshold_sum", "must be positive");
  t.joints_local = detail::joints_at(require("joints_local"), 0, "joints_local");
  return t;
}

inline std::string format_template(const GestureTemplate& t) {
  nlohmann::ordered_json j;
  j["format_version"] = kTemplateFormatVersion;
  j["name"] = t.name;
  j["object_id"] = t.object_id;
  j["role"] = std::string(to_string(t.role));
  j["threshold_sum"] = t.threshold_sum;
  j["joints_local"] = detail::joints_json(t.joints_local);
  return j.dump(1) + "\n";
}

inline GestureTemplate load_template(const std::filesystem::path& path, GestureId id = 0) {
  try {
    return parse_template(detail::read_file(path), id);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.field(), path.string() + ": " + e.what());
  }
}

inline void save_template(const std::filesystem::path& path, const GestureTemplate& t) {
  detail::write_file(path, format_template(t));
}

// ---------------------------------------------------------------------------
// Scene configuration
//
// {
//   "format_version": 1,
//   "scene_id": "study",
//   "hover_radius": 0.1,                       (optional)
//   "release_policy": "template"|"deviation",  (optional)
//   "generic_templates": ["grab/fist.gesture", ...],
//   "objects": [{"id": "cube", "position": [x,y,z], "radius": 0.05,
//                "templates": ["cube.gesture"]}, ...],
//   "protocol": {"repetitions": 3, "seed": 7, "target_diameter": 0.5,
//                "first_target": [x,y,z], "reach_min": [..], "reach_max": [..],
//                "placement_delay": 1.0},
//   "color_bands": {"green_below": 0.02, "yellow_below": 0.05}
// }
//
// Template paths are relative to the config file. Gesture ids are assigned in
// file order: generic templates first, then each object's templates.

inline Scene parse_scene(std::string_view text, const std::filesystem::path& base_dir) {
  const nlohmann::json j = detail::parse_json(text, 0);
  if (!j.is_object()) throw ParseError(0, "", "expected a JSON object");
  const auto number_or = [](const nlohmann::json& obj, const char* key, double fallback, const std::string& path) {
    return obj.contains(key) ? detail::number_at(obj.at(key), 0, path + key) : fallback;
  };

  Scene scene;
  SceneConfig& cfg = scene.config;
  if (j.contains("format_version")) {
    if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() > kSceneFormatVersion) {
      throw ParseError(0, "format_version", "unsupported scene format");
    }
  }
  if (!j.contains("scene_id") || !j["scene_id"].is_string()) throw ParseError(0, "scene_id", "expected a string");
  cfg.scene_id = j["scene_id"].get<std::string>();
  cfg.hover_radius = number_or(j, "hover_radius", kDefaultHoverRadius, "");
  if (!(cfg.hover_radius > 0.0)) throw ParseError(0, "hover_radius", "must be positive");
  if (j.contains("release_policy")) {
    const auto& p = j["release_policy"];
    if (p == "template") {
      cfg.release_policy = ReleasePolicy::template_match;
    } else if (p == "deviation") {
      cfg.release_policy = ReleasePolicy::deviation;
    } else {
      throw ParseError(0, "release_policy", "expected \"template\" or \"deviation\"");
    }
  }

  std::vector<GestureTemplate> templates;
  GestureId next_id = 1;
  const auto load = [&](const nlohmann::json& entry, const std::string& field) {
    if (!entry.is_string()) throw ParseError(0, field, "expected a template path");
    GestureTemplate t = load_template(base_dir / entry.get<std::string>(), next_id++);
    templates.push_back(t);
    return t.id;
  };

  if (j.contains("generic_templates")) {
    const auto& g = j["generic_templates"];
    if (!g.is_array()) throw ParseError(0, "generic_templates", "expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      cfg.generic_gestures.push_back(load(g[i], "generic_templates[" + std::to_string(i) + "]"));
    }
  }

  if (!j.contains("objects") || !j["objects"].is_array()) throw ParseError(0, "objects", "expected an array");
  const auto& objects = j["objects"];
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "].";
    const auto& o = objects[i];
    if (!o.is_object()) throw ParseError(0, path, "expected an object");
    SceneObject obj;
    if (!o.contains("id") || !o["id"].is_string()) throw ParseError(0, path + "id", "expected a string");
    obj.id = o["id"].get<std::string>();
    for (const auto& existing : cfg.objects) {
      if (existing.id == obj.id) throw ParseError(0, path + "id", "duplicate object id '" + obj.id + "'");
    }
    if (!o.contains("position")) throw ParseError(0, path + "position", "missing");
    obj.pose.translation = detail::vec3_at(o["position"], 0, path + "position");
    obj.bounding_radius = number_or(o, "radius", 0.05, path);
    if (!(obj.bounding_radius > 0.0)) throw ParseError(0, path + "radius", "must be positive");
    if (o.contains("templates")) {
      const auto& ts = o["templates"];
      if (!ts.is_array()) throw ParseError(0, path + "templates", "expected an array");
      for (std::size_t k = 0; k < ts.size(); ++k) {
        obj.attach(load(ts[k], path + "templates[" + std::to_string(k) + "]"));
      }
    }
    cfg.objects.push_back(std::move(obj));
  }

  if (j.contains("protocol")) {
    const auto& p = j["protocol"];
    if (!p.is_object()) throw ParseError(0, "protocol", "expected an object");
    auto& proto = cfg.protocol;
    if (p.contains("repetitions")) {
      if (!p["repetitions"].is_number_unsigned()) throw ParseError(0, "protocol.repetitions", "expected a count");
      proto.repetitions = p["repetitions"].get<std::size_t>();
    }
    if (p.contains("seed")) {
      if (!p["seed"].is_number_unsigned()) throw ParseError(0, "protocol.seed", "expected an unsigned integer");
      proto.seed = p["seed"].get<std::uint64_t>();
    }
    proto.target_diameter = number_or(p, "target_diameter", proto.target_diameter, "protocol.");
    if (!(proto.target_diameter > 0.0)) throw ParseError(0, "protocol.target_diameter", "must be positive");
    proto.placement_delay = number_or(p, "placement_delay", proto.placement_delay, "protocol.");
    if (p.contains("first_target")) proto.first_target = detail::vec3_at(p["first_target"], 0, "protocol.first_target");
    if (p.contains("reach_min")) proto.reach.min = detail::vec3_at(p["reach_min"], 0, "protocol.reach_min");
    if (p.contains("reach_max")) proto.reach.max = detail::vec3_at(p["reach_max"], 0, "protocol.reach_max");
  }
  if (j.contains("color_bands")) {
    const auto& b = j["color_bands"];
    cfg.bands.green_below = number_or(b, "green_below", cfg.bands.green_below, "color_bands.");
    cfg.bands.yellow_below = number_or(b, "yellow_below", cfg.bands.yellow_below, "color_bands.");
  }

  scene.templates = std::make_shared<const TemplateStore>(std::move(templates));
  return scene;
}

inline Scene load_scene(const std::filesystem::path& path) {
  return parse_scene(detail::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Results table

inline constexpr std::string_view kResultsHeader = "technique,object,accuracy_m,tct_s,dropped,band";

inline std::string format_result_row(const TrialResult& r) {
  char buf[64];
  std::string out(to_string(r.technique));
  out += ',' + r.object_id + ',';
  std::snprintf(buf, sizeof buf, "%.9f,%.9f", r.accuracy, r.tct);
  out += buf;
  out += r.dropped ? ",1," : ",0,";
  out += to_string(r.band);
  return out;
}

inline void write_results(std::ostream& out, std::span<const TrialResult> results, const TechniqueSummary& summary) {
  out << kResultsHeader << '\n';
  for (const auto& r : results) out << format_result_row(r) << '\n';
  out << "# " << format_summary(summary) << '\n';
}

inline void write_results(const std::filesystem::path& path, std::span<const TrialResult> results,
                          const TechniqueSummary& summary) {
  std::ostringstream ss;
  write_results(ss, results, summary);
  detail::write_file(path, ss.str());
}

/// Read result rows; '#' lines and the header are skipped.
inline std::vector<TrialResult> read_results(std::istream& in) {
  std::vector<TrialResult> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kResultsHeader) throw ParseError(line_no, "header", "unexpected results header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError(line_no, "", "expected 6 columns");
    TrialResult r;
    const auto tech = parse_technique(cells[0]);
    if (!tech) throw ParseError(line_no, "technique", "unknown technique '" + cells[0] + "'");
    r.technique = *tech;
    r.object_id = cells[1];
    try {
      std::size_t used = 0;
      r.accuracy = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("trailing");
      r.tct = std::stod(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line_no, "accuracy_m/tct_s", "expected numbers");
    }
    if (cells[4] != "0" && cells[4] != "1") throw ParseError(line_no, "dropped", "expected 0 or 1");
    r.dropped = cells[4] == "1";
    if (cells[5] == "green") {
      r.band = ColorBand::green;
    } else if (cells[5] == "yellow") {
      r.band = ColorBand::yellow;
    } else if (cells[5] == "red") {
      r.band = ColorBand::red;
    } else {
      throw ParseError(line_no, "band", "unknown band '" + cells[5] + "'");
    }
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(0, "header", "missing results header");
  return out;
}

inline std::vector<TrialResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_results(in);
}

}  // namespace graspkit::io
