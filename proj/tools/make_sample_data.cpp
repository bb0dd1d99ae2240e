// Writes the sample study scene, its gesture templates, scripted clean replays
// for every technique and the golden results tables.
//
//   make_sample_data <out-dir>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/graspkit.hpp"

namespace gk = graspkit;
namespace fs = std::filesystem;

namespace {

struct ObjectDef {
  const char* id;
  double radius;
};

// Bounding radii roughly follow the object sizes; the hammer is about 25 cm long.
constexpr ObjectDef kObjects[] = {
    {"nail", 0.04},  {"cube", 0.05},  {"small_cube", 0.025}, {"hammer", 0.125},
    {"ball", 0.04},  {"plate", 0.10}, {"cylinder", 0.06},    {"paper", 0.10},
};

const gk::Vec3 kSpawn(0.0, 0.9, 0.4);

// Capture an object's grasp the way a user would: hold the shape still around the
// object until the session completes.
gk::GestureTemplate capture_grasp(std::size_t index, gk::SceneObject& object, gk::GestureId id) {
  const gk::RigidTransform placement =
      gk::RigidTransform::from_translation(object.center() - gk::synth::palm_center_local());
  const gk::HandFrame still = gk::synth::pose_frame(gk::synth::object_grasp_shape(index), placement, 0.0);
  gk::CaptureParams params;
  params.template_id = id;
  gk::CaptureSession session(object.id, params);
  for (int i = 0;; ++i) {
    gk::HandFrame f = still;
    f.timestamp = i / 90.0;
    auto result = gk::capture_step(session, f, object);
    if (auto* t = std::get_if<gk::GestureTemplate>(&result)) return *t;
    if (i > 90 * 10) throw gk::InvalidState("capture never completed for " + object.id);
  }
}

gk::GestureTemplate generic(gk::synth::PoseKind kind, const std::string& name, gk::GestureRole role) {
  const auto frame = gk::synth::pose_frame(gk::synth::shape_for(kind), gk::synth::default_placement(), 0.0);
  return gk::make_template(frame, 0, name, "", role);
}

nlohmann::ordered_json vec(const gk::Vec3& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_sample_data <out-dir>\n";
    return 1;
  }
  const fs::path root = argv[1];
  fs::create_directories(root / "templates");
  fs::create_directories(root / "replays");
  fs::create_directories(root / "golden");

  nlohmann::ordered_json scene;
  scene["format_version"] = 1;
  scene["scene_id"] = "study";
  scene["hover_radius"] = 0.1;
  scene["generic_templates"] = {"templates/grab_closed.gesture", "templates/release_partial.gesture",
                                "templates/release_open.gesture"};
  gk::io::save_template(root / "templates/grab_closed.gesture",
                        generic(gk::synth::PoseKind::fist, "grab_closed", gk::GestureRole::grab));
  gk::io::save_template(root / "templates/release_partial.gesture",
                        generic(gk::synth::PoseKind::partial_open, "release_partial", gk::GestureRole::release));
  gk::io::save_template(root / "templates/release_open.gesture",
                        generic(gk::synth::PoseKind::open, "release_open", gk::GestureRole::release));

  auto objects = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < std::size(kObjects); ++i) {
    gk::SceneObject obj;
    obj.id = kObjects[i].id;
    obj.bounding_radius = kObjects[i].radius;
    obj.pose.translation = kSpawn;
    const auto tmpl = capture_grasp(i, obj, static_cast<gk::GestureId>(i + 1));
    const std::string file = "templates/" + obj.id + ".gesture";
    gk::io::save_template(root / file, tmpl);
    objects.push_back({{"id", obj.id}, {"position", vec(kSpawn)}, {"radius", obj.bounding_radius},
                       {"templates", {file}}});
  }
  scene["objects"] = objects;
  gk::ProtocolParams proto;
  proto.seed = 2023;
  scene["protocol"] = {{"repetitions", proto.repetitions},
                       {"seed", proto.seed},
                       {"target_diameter", proto.target_diameter},
                       {"first_target", vec(proto.first_target)},
                       {"reach_min", vec(proto.reach.min)},
                       {"reach_max", vec(proto.reach.max)},
                       {"placement_delay", proto.placement_delay}};
  scene["color_bands"] = {{"green_below", 0.02}, {"yellow_below", 0.05}};
  gk::io::detail::write_file(root / "study.scene.json", scene.dump(2) + "\n");

  const gk::Scene loaded = gk::io::load_scene(root / "study.scene.json");
  for (gk::Technique t : {gk::Technique::controller, gk::Technique::pinch, gk::Technique::grab,
                          gk::Technique::custom}) {
    const std::string name(gk::to_string(t));
    const auto frames = gk::synth::script_protocol_run(loaded, t);
    const fs::path replay = root / "replays" / (name + ".frames");
    gk::io::write_frames(replay, frames);
    const auto report = gk::run_replay(loaded, gk::io::read_frames(replay), t);
    gk::io::write_results(root / "golden" / (name + ".csv"), report.results, report.summary);
    std::cout << gk::format_summary(report.summary) << "  (" << frames.size() << " frames)\n";
  }
  return 0;
}
