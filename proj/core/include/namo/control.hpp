#pragma once

#include <array>
#include <optional>

#include "namo/costmap.hpp"
#include "namo/geometry.hpp"
#include "namo/planner.hpp"
#include "namo/world.hpp"

namespace namo {

inline constexpr double kGravity = 9.81;

enum class Mode { Follow, Rotate, Push, ReplanWait, Done, Stuck };

inline constexpr std::array<Mode, 6> kAllModes = {Mode::Follow,     Mode::Rotate, Mode::Push,
                                                  Mode::ReplanWait, Mode::Done,   Mode::Stuck};

const char* to_string(Mode m);

enum class EventKind {
  None,
  PushStarted,
  ReplanRequested,
  PathOpened,
  CurrentLimitExceeded,
  GoalReached,
  Stuck
};

inline constexpr std::array<EventKind, 7> kAllEvents = {
    EventKind::None,       EventKind::PushStarted,          EventKind::ReplanRequested,
    EventKind::PathOpened, EventKind::CurrentLimitExceeded, EventKind::GoalReached,
    EventKind::Stuck};

const char* to_string(EventKind e);

struct ControlEvent {
  EventKind kind{EventKind::None};
  std::optional<int> object_id;

  bool operator==(const ControlEvent&) const = default;
};

struct RobotState {
  Pose2D pose;
  double v{0.0};
  double omega{0.0};
  /// Motor current drawn on the previous step.
  double current{0.0};
  Mode mode{Mode::Follow};
  /// Object the controller is deliberately pushing.
  std::optional<int> push_contact;
  /// Object that loaded the motors on the previous step, if any.
  std::optional<int> loaded_by;
};

struct VelocityCommand {
  double v{0.0};
  double omega{0.0};
};

struct PursuitConfig {
  double lookahead{0.5};
  double heading_threshold{kPi / 3.0};
};

/// First waypoint at arc distance >= lookahead past the waypoint nearest to
/// `position`, or the last waypoint when the path is shorter.
Vec2 lookahead_point(const PlannedPath& path, Vec2 position, double lookahead);

/// Throws std::invalid_argument on an empty path.
VelocityCommand pure_pursuit_step(const RobotState& state, const PlannedPath& path,
                                  const RobotParams& params, const PursuitConfig& config = {});

/// Quasi-static sliding threshold mu * m * g.
double push_required_force(const ObjectInstance& obj, double g = kGravity);

/// Linear proxy: idle current plus a per-newton share of the push force.
double motor_current(double push_force, const RobotParams& params);

/// Total transition table. Done and Stuck absorb every event.
Mode transition(Mode mode, EventKind event);

struct ControllerConfig {
  PursuitConfig pursuit;
  Vec2 goal;
  double goal_tolerance{0.15};
  int replan_period_ticks{20};
  int limit_debounce{5};
  int max_failed_plans{3};
  /// Largest gap between robot disc and object outline that counts as contact.
  double contact_tolerance{0.02};
};

/// What the controller may observe about the world besides its own state.
class WorldView {
 public:
  virtual ~WorldView() = default;
  virtual const LayeredCostmap& costmap() const = 0;
  /// Gap between the robot disc and the outline of object `id`; nullopt if
  /// the object does not exist.
  virtual std::optional<double> clearance_to(int id) const = 0;
};

struct TickOutput {
  VelocityCommand cmd;
  ControlEvent event;
};

/// Follow / push / replan state machine. One event per tick at most; when
/// several fire together the order is GoalReached, CurrentLimitExceeded,
/// Stuck, PushStarted, ReplanRequested, PathOpened.
class PushController {
 public:
  PushController(RobotParams params, ControllerConfig config);

  /// Advances one tick. Reads state.current and state.loaded_by from the
  /// last step; writes state.mode and state.push_contact.
  TickOutput tick(RobotState& state, const PlannedPath& path, const WorldView& world);

  /// Reports the outcome of a plan request. A path that no longer enters the
  /// pushed object's footprint opens the way and ends the push.
  void on_plan(RobotState& state, const PlannedPath& path, const WorldView& world);
  void on_plan_failed(RobotState& state);

  int failed_plans() const { return failed_plans_; }
  const RobotParams& params() const { return params_; }
  const ControllerConfig& config() const { return config_; }

 private:
  void apply(RobotState& state, const ControlEvent& event);

  RobotParams params_;
  ControllerConfig config_;
  int over_limit_ticks_{0};
  int ticks_since_replan_{0};
  int failed_plans_{0};
  std::optional<ControlEvent> pending_;
};

}  // namespace namo
