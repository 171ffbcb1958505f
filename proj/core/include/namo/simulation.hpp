#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "namo/control.hpp"
#include "namo/costmap.hpp"
#include "namo/perception.hpp"
#include "namo/planner.hpp"
#include "namo/render.hpp"
#include "namo/scenario.hpp"

namespace namo {

enum class PerceptionMode { Rendered, Oracle };

const char* to_string(PerceptionMode m);

enum class Outcome { Success, Stuck, MaxTicks };

const char* to_string(Outcome o);

struct ControllerTuning {
  double lookahead{0.5};
  double heading_threshold{kPi / 3.0};
  double replan_period_s{1.0};
  int limit_debounce{5};
  int max_failed_plans{3};
  double contact_tolerance{0.02};
};

struct SimulationOptions {
  PerceptionMode perception{PerceptionMode::Rendered};
  /// Overrides the scenario's tick budget when set.
  std::optional<int> max_ticks;
  CameraIntrinsics camera;
  CameraExtrinsics mount;
  PerceptionParams perception_params;
  /// Rendered mode only: before the first plan the robot looks around from
  /// its start pose in this many evenly spaced headings (0 disables).
  int initial_scan_views{8};
  double object_height{0.4};
  double wall_height{1.0};
  /// Inflation radius is the robot radius plus this margin.
  double inflation_margin{0.05};
  ControllerTuning controller;
  /// Current drawn while pushing an object that cannot move, as a multiple
  /// of the robot's current limit.
  double stall_current_factor{2.0};
  /// A run that gets no closer to the goal for this many ticks is stuck.
  int watchdog_ticks{600};
};

struct PushRecord {
  int object_id{0};
  double push_distance_m{0.0};
  double max_current_a{0.0};
  bool limit_tripped{false};
};

struct SimulationReport {
  bool success{false};
  Outcome outcome{Outcome::MaxTicks};
  int ticks{0};
  double sim_time_s{0.0};
  double path_length_m{0.0};
  int replans{0};
  std::vector<PushRecord> pushes;
  Pose2D final_pose;
  /// Ticks on which the robot overlapped a wall or a fatal object.
  int safety_violations{0};
  double max_penetration_m{0.0};
};

struct TrajectoryRow {
  int tick{0};
  double t{0.0};
  Pose2D pose;
  double v{0.0};
  double omega{0.0};
  Mode mode{Mode::Follow};
  double current{0.0};
  EventKind event{EventKind::None};
  std::optional<int> object_id;
  /// Objects touching the robot after this tick.
  std::vector<int> contacts;
};

/// Read-only view of the world handed to frame hooks.
struct FrameSnapshot {
  int tick{0};
  const Scenario& scenario;
  const LayeredCostmap& costmap;
  const PlannedPath& path;
  const std::vector<ObjectInstance>& objects;
  const RobotState& robot;
};

using FrameHook = std::function<void(const FrameSnapshot&)>;

struct SimulationResult {
  SimulationReport report;
  std::vector<TrajectoryRow> rows;
  LayeredCostmap final_costmap;
  PlannedPath final_path;
};

/// Perceived cells of every object seen by the camera at `robot_pose`.
std::map<GridIndex, int> perception_tick(const Scenario& scenario,
                                         const std::vector<ObjectInstance>& objects,
                                         const Pose2D& robot_pose,
                                         const SimulationOptions& options);

/// Render scene for the ground truth: walls at wall_height, objects at
/// object_height labeled with their ids.
RenderScene make_render_scene(const Scenario& scenario, const std::vector<ObjectInstance>& objects,
                              const SimulationOptions& options);

/// Runs the closed loop until the goal is reached, the robot is stuck or
/// the tick budget runs out. Deterministic for a given scenario and options.
/// `hook` sees the world after tick 0 and after every later tick.
SimulationResult run_scenario(const Scenario& scenario, const SimulationOptions& options = {},
                              const FrameHook& hook = {});

/// tick,t,x,y,theta,v,omega,mode,current,event,object_id
void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, std::ostream& out);

/// Report as JSON with a fixed key order.
void write_report_json(const SimulationReport& report, std::ostream& out);

/// Top-down SVG: costmap heat, walls, objects, planned path and robot.
void write_svg_frame(const FrameSnapshot& frame, std::ostream& out);

/// Sum of displacements between consecutive rows.
double trajectory_length(const std::vector<TrajectoryRow>& rows);

}  // namespace namo
