// graspkit command line: capture, recognize, simulate, synth, stats, latin-square, serve.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 protocol violation.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "graspkit/graspkit.hpp"
#include "graspkit/serve.hpp"

namespace gk = graspkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProtocol = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "<id>" resolved through a scene, or inline "<id>:<x>,<y>,<z>:<radius>".
gk::SceneObject resolve_object(const std::string& arg, const std::string& scene_path) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos) {
    if (scene_path.empty()) throw UsageError("--object '" + arg + "' needs --scene, or use id:x,y,z:radius");
    const gk::Scene scene = gk::io::load_scene(scene_path);
    for (const auto& o : scene.config.objects) {
      if (o.id == arg) return o;
    }
    throw UsageError("object '" + arg + "' not found in " + scene_path);
  }
  gk::SceneObject obj;
  obj.id = arg.substr(0, colon);
  const auto second = arg.find(':', colon + 1);
  if (obj.id.empty() || second == std::string::npos) throw UsageError("bad --object '" + arg + "'");
  std::string pos = arg.substr(colon + 1, second - colon - 1);
  for (auto& c : pos) {
    if (c == ',') c = ' ';
  }
  std::istringstream ps(pos);
  double x = 0, y = 0, z = 0;
  if (!(ps >> x >> y >> z)) throw UsageError("bad --object position in '" + arg + "'");
  obj.pose.translation = gk::Vec3(x, y, z);
  try {
    obj.bounding_radius = std::stod(arg.substr(second + 1));
  } catch (const std::exception&) {
    throw UsageError("bad --object radius in '" + arg + "'");
  }
  if (!(obj.bounding_radius > 0.0)) throw UsageError("--object radius must be positive");
  return obj;
}

int cmd_capture(const std::string& in, const std::string& object_spec, const std::string& scene_path,
                const std::string& out, double hold) {
  gk::SceneObject object = resolve_object(object_spec, scene_path);
  object.gestures.clear();
  const auto frames = gk::io::read_frames(in);
  gk::CaptureParams params;
  params.hold_required = hold;
  gk::CaptureSession session(object.id, params);
  for (const auto& f : frames) {
    try {
      const auto result = gk::capture_step(session, f, object);
      if (const auto* tmpl = std::get_if<gk::GestureTemplate>(&result)) {
        gk::io::save_template(out, *tmpl);
        std::cout << "captured " << tmpl->name << " on " << object.id << " at t=" << gk::format_number(f.timestamp)
                  << '\n';
        return kExitOk;
      }
    } catch (const gk::HandLost& e) {
      std::cerr << "capture aborted: " << e.what() << '\n';
      return kExitData;
    }
  }
  std::cerr << "capture incomplete: stream ended at " << gk::format_number(session.progress() * 100.0)
            << "% progress\n";
  return kExitData;
}

int cmd_recognize(const std::string& in, const std::string& scene_path) {
  const gk::Scene scene = gk::io::load_scene(scene_path);
  std::vector<gk::SceneObject> objects = scene.config.objects;
  for (auto& o : objects) {
    for (gk::GestureId id : scene.config.generic_gestures) o.attach(id);
  }
  gk::GrabParams params;
  params.policy = scene.config.release_policy.value_or(gk::ReleasePolicy::deviation);
  gk::GestureEngine engine(scene.templates, scene.config.hover_radius, params);
  const auto frames = gk::io::read_frames(in);
  for (const auto& f : frames) {
    for (const auto& e : engine.step(f, objects)) std::cout << gk::format_event(e) << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scene_path, const std::string& in, const std::string& technique_name,
                 const std::string& out) {
  const auto technique = gk::parse_technique(technique_name);
  if (!technique) throw UsageError("unknown technique '" + technique_name + "'");
  const gk::Scene scene = gk::io::load_scene(scene_path);
  const auto frames = gk::io::read_frames(in);
  try {
    const auto report = gk::run_replay(scene, frames, *technique);
    gk::io::write_results(out, report.results, report.summary);
    std::cout << gk::format_summary(report.summary) << '\n';
    return kExitOk;
  } catch (const gk::IncompleteRun& e) {
    gk::io::write_results(out, e.partial().results, e.partial().summary);
    std::cout << gk::format_summary(e.partial().summary) << '\n';
    std::cerr << "incomplete run: " << e.what() << '\n';
    return kExitData;
  }
}

int cmd_synth(const std::string& pose, double sigma, std::uint64_t seed, double duration, double rate,
              const std::string& out) {
  const auto kind = gk::synth::parse_pose_kind(pose);
  if (!kind) throw UsageError("unknown pose '" + pose + "'");
  if (!(sigma >= 0.0)) throw UsageError("--sigma must be non-negative");
  if (!(rate > 0.0)) throw UsageError("--rate must be positive");
  if (!(duration >= 0.0)) throw UsageError("--duration must be non-negative");
  const auto frames = gk::synth::generate_stream(*kind, sigma, seed, duration, rate);
  gk::io::write_frames(out, frames);
  return kExitOk;
}

void print_descriptive(const char* label, const std::vector<double>& xs) {
  if (xs.empty()) {
    std::cout << "  " << label << ": n=0\n";
    return;
  }
  const auto d = gk::stats::descriptive(xs);
  std::cout << "  " << label << ": n=" << d.n << " mean=" << gk::format_number(d.mean)
            << " sd=" << gk::format_number(d.sd) << '\n';
}

void print_anova(const char* label, const std::vector<std::vector<double>>& groups) {
  try {
    const auto r = gk::stats::anova_oneway(groups);
    char buf[160];
    if (r.f_infinite) {
      std::snprintf(buf, sizeof buf, "anova %s: F(%zu,%zu) = inf, p = 0", label, r.df_between, r.df_within);
    } else {
      std::snprintf(buf, sizeof buf, "anova %s: F(%zu,%zu) = %.6f, p = %.6g", label, r.df_between, r.df_within, r.f,
                    r.p);
    }
    std::cout << buf << '\n';
  } catch (const gk::stats::DegenerateInput& e) {
    std::cout << "anova " << label << ": not computed (" << e.what() << ")\n";
  }
}

int cmd_stats(const std::vector<std::string>& files) {
  std::map<gk::Technique, std::vector<gk::TrialResult>> by_technique;
  for (const auto& path : files) {
    for (auto& r : gk::io::read_results(path)) by_technique[r.technique].push_back(std::move(r));
  }
  std::vector<std::vector<double>> acc_groups, tct_groups;
  for (const auto& [technique, rows] : by_technique) {
    std::vector<double> acc, tct;
    std::size_t drops = 0;
    for (const auto& r : rows) {
      if (r.dropped) {
        ++drops;
        continue;
      }
      acc.push_back(r.accuracy);
      tct.push_back(r.tct);
    }
    std::cout << gk::to_string(technique) << ": placements=" << acc.size() << " drops=" << drops << '\n';
    print_descriptive("accuracy_m", acc);
    print_descriptive("tct_s", tct);
    acc_groups.push_back(std::move(acc));
    tct_groups.push_back(std::move(tct));
  }
  if (by_technique.size() >= 2) {
    print_anova("accuracy_m", acc_groups);
    print_anova("tct_s", tct_groups);
  }
  return kExitOk;
}

int cmd_latin_square(std::size_t n, std::size_t row) {
  const auto order = gk::latin_square_order(n, row);
  for (std::size_t i = 0; i < order.size(); ++i) std::cout << (i ? " " : "") << order[i];
  std::cout << '\n';
  return kExitOk;
}

int cmd_serve(std::uint16_t port, const std::string& host, const std::vector<std::string>& scenes) {
  auto catalog = std::make_shared<gk::serve::SceneCatalog>();
  for (const auto& path : scenes) catalog->add(gk::io::load_scene(path));

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  gk::serve::RecognitionServer server(catalog);
  const std::uint16_t bound = server.listen(port, host);
  std::cout << "listening on " << host << ':' << bound << std::endl;
  std::thread accept_loop([&server] { server.run(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  accept_loop.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graspkit: object-tailored grasp gesture authoring, recognition and replay"};
  app.require_subcommand(1);

  std::string in, out, object, scene, technique, pose, host = "127.0.0.1";
  std::vector<std::string> results, scenes;
  double sigma = 0.0, duration = 1.0, rate = 90.0, hold = 3.0;
  std::uint64_t seed = 0;
  std::size_t n = 0, row = 0;
  std::uint16_t port = 0;

  auto* capture = app.add_subcommand("capture", "Capture a grasp gesture from a still hand near an object");
  capture->add_option("--in", in, "Frame stream (.frames)")->required();
  capture->add_option("--object", object, "Object id (with --scene) or id:x,y,z:radius")->required();
  capture->add_option("--scene", scene, "Scene config resolving --object");
  capture->add_option("--out", out, "Template file to write (.gesture)")->required();
  capture->add_option("--hold", hold, "Seconds the hand must stay still")->capture_default_str();

  auto* recognize = app.add_subcommand("recognize", "Print the hover/grab/release event log of a stream");
  recognize->add_option("--in", in, "Frame stream (.frames)")->required();
  recognize->add_option("--scene", scene, "Scene config")->required();

  auto* simulate = app.add_subcommand("simulate", "Replay a stream through the grab-and-place protocol");
  simulate->add_option("--scene", scene, "Scene config")->required();
  simulate->add_option("--in", in, "Frame stream (.frames)")->required();
  simulate->add_option("--technique", technique, "controller | pinch | grab | custom")->required();
  simulate->add_option("--out", out, "Results table (.csv)")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic single-pose stream");
  synth->add_option("--pose", pose, "open | fist | pinch | relaxed | partial_open")->required();
  synth->add_option("--sigma", sigma, "Per-coordinate Gaussian noise (m)")->required();
  synth->add_option("--seed", seed, "Noise seed")->required();
  synth->add_option("--duration", duration, "Seconds")->required();
  synth->add_option("--rate", rate, "Frames per second")->required();
  synth->add_option("--out", out, "Frame stream to write")->required();

  auto* stats = app.add_subcommand("stats", "Descriptive statistics and one-way ANOVA across techniques");
  stats->add_option("--results", results, "Results tables")->required()->expected(1, -1);

  auto* latin = app.add_subcommand("latin-square", "Print a balanced Latin square condition order");
  latin->add_option("--n", n, "Number of conditions")->required();
  latin->add_option("--row", row, "Participant / row index")->required();

  auto* serve = app.add_subcommand("serve", "Run the line-oriented TCP recognition service");
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->required();
  serve->add_option("--scene", scenes, "Scene configs to host (repeatable)")->required();
  serve->add_option("--host", host, "Listen address")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*capture) return cmd_capture(in, object, scene, out, hold);
    if (*recognize) return cmd_recognize(in, scene);
    if (*simulate) return cmd_simulate(scene, in, technique, out);
    if (*synth) return cmd_synth(pose, sigma, seed, duration, rate, out);
    if (*stats) return cmd_stats(results);
    if (*latin) return cmd_latin_square(n, row);
    if (*serve) return cmd_serve(port, host, scenes);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gk::ProtocolViolation& e) {
    std::cerr << "protocol violation: " << e.what() << '\n';
    return kExitProtocol;
  } catch (const gk::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
