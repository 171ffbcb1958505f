// namo-sim: runs a scenario file and writes trajectory, report and frames.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "namo/simulation.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitStuck = 2;
constexpr int kExitMaxTicks = 3;

struct RunArgs {
  std::string scenario;
  std::string out_dir = "namo_out";
  int svg_every = 0;
  int max_ticks = 0;
  std::string perception = "rendered";
  bool quiet = false;
  bool dump_costmap = false;
};

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

int run(const RunArgs& args) {
  namo::Scenario scenario;
  try {
    scenario = namo::load_scenario(args.scenario);
  } catch (const namo::ScenarioError& e) {
    std::cerr << "invalid scenario " << args.scenario << ":\n";
    for (const std::string& p : e.problems()) {
      std::cerr << "  " << p << '\n';
    }
    return kExitInvalid;
  }

  namo::SimulationOptions options;
  options.perception =
      args.perception == "oracle" ? namo::PerceptionMode::Oracle : namo::PerceptionMode::Rendered;
  if (args.max_ticks > 0) {
    options.max_ticks = args.max_ticks;
  }

  const std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);

  namo::FrameHook hook;
  if (args.svg_every > 0) {
    hook = [&](const namo::FrameSnapshot& frame) {
      if (frame.tick % args.svg_every != 0) {
        return;
      }
      char name[64];
      std::snprintf(name, sizeof(name), "frame_%06d.svg", frame.tick);
      auto out = open_or_throw(out_dir / name);
      namo::write_svg_frame(frame, out);
    };
  }

  const namo::SimulationResult result = namo::run_scenario(scenario, options, hook);
  {
    auto csv = open_or_throw(out_dir / "trajectory.csv");
    namo::write_trajectory_csv(result.rows, csv);
    auto json = open_or_throw(out_dir / "report.json");
    namo::write_report_json(result.report, json);
  }
  if (args.dump_costmap) {
    auto pgm = open_or_throw(out_dir / "costmap.pgm");
    namo::write_costmap_pgm(result.final_costmap, pgm);
    auto table = open_or_throw(out_dir / "objects.txt");
    namo::write_object_table(result.final_costmap, table);
    auto path = open_or_throw(out_dir / "path.csv");
    namo::write_path_csv(result.final_path, path);
  }

  const namo::SimulationReport& r = result.report;
  if (!args.quiet) {
    std::printf("%s: %s after %d ticks (%.2f s), path %.3f m, %d replans, %zu pushes\n",
                scenario.name.c_str(), namo::to_string(r.outcome), r.ticks, r.sim_time_s,
                r.path_length_m, r.replans, r.pushes.size());
    for (const namo::PushRecord& p : r.pushes) {
      std::printf("  object %d pushed %.3f m, max %.2f A%s\n", p.object_id, p.push_distance_m,
                  p.max_current_a, p.limit_tripped ? ", current limit tripped" : "");
    }
    if (r.safety_violations > 0) {
      std::printf("  %d safety violations, max penetration %.6f m\n", r.safety_violations,
                  r.max_penetration_m);
    }
  }
  switch (r.outcome) {
    case namo::Outcome::Success:
      return kExitSuccess;
    case namo::Outcome::Stuck:
      return kExitStuck;
    case namo::Outcome::MaxTicks:
      return kExitMaxTicks;
  }
  return kExitMaxTicks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic 2D navigation among movable obstacles"};
  app.require_subcommand(1);
  RunArgs args;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario file");
  run_cmd->add_option("--scenario", args.scenario, "Scenario JSON")->required();
  run_cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--svg-every", args.svg_every, "Write an SVG frame every N ticks")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--max-ticks", args.max_ticks, "Override the scenario tick budget")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--perception", args.perception, "Object perception source")
      ->check(CLI::IsMember({"rendered", "oracle"}))
      ->capture_default_str();
  run_cmd->add_flag("--quiet", args.quiet, "Print nothing on success");
  run_cmd->add_flag("--dump-costmap", args.dump_costmap,
                    "Also write the final costmap, object table and path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  try {
    return run(args);
  } catch (const std::exception& e) {
    std::cerr << "namo-sim: " << e.what() << '\n';
    return kExitInvalid;
  }
}
