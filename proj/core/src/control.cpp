#include "namo/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace namo {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Follow:
      return "FOLLOW";
    case Mode::Rotate:
      return "ROTATE";
    case Mode::Push:
      return "PUSH";
    case Mode::ReplanWait:
      return "REPLAN_WAIT";
    case Mode::Done:
      return "DONE";
    case Mode::Stuck:
      return "STUCK";
  }
  return "?";
}

const char* to_string(EventKind e) {
  switch (e) {
    case EventKind::None:
      return "";
    case EventKind::PushStarted:
      return "PushStarted";
    case EventKind::ReplanRequested:
      return "ReplanRequested";
    case EventKind::PathOpened:
      return "PathOpened";
    case EventKind::CurrentLimitExceeded:
      return "CurrentLimitExceeded";
    case EventKind::GoalReached:
      return "GoalReached";
    case EventKind::Stuck:
      return "Stuck";
  }
  return "?";
}

Vec2 lookahead_point(const PlannedPath& path, Vec2 position, double lookahead) {
  if (path.empty()) {
    throw std::invalid_argument("lookahead on an empty path");
  }
  const std::size_t start = nearest_waypoint(path, position);
  double travelled = 0.0;
  for (std::size_t i = start + 1; i < path.waypoints.size(); ++i) {
    travelled += (path.waypoints[i] - path.waypoints[i - 1]).norm();
    if (travelled >= lookahead) {
      return path.waypoints[i];
    }
  }
  return path.waypoints.back();
}

VelocityCommand pure_pursuit_step(const RobotState& state, const PlannedPath& path,
                                  const RobotParams& params, const PursuitConfig& config) {
  if (path.empty()) {
    throw std::invalid_argument("pure pursuit needs a non-empty path");
  }
  const Vec2 target = lookahead_point(path, state.pose.position(), config.lookahead);
  const Vec2 d = target - state.pose.position();
  const double c = std::cos(state.pose.theta);
  const double s = std::sin(state.pose.theta);
  const double x_l = c * d.x + s * d.y;
  const double y_l = -s * d.x + c * d.y;
  const double l2 = x_l * x_l + y_l * y_l;
  if (l2 < 1e-18) {
    return {};
  }
  if (std::abs(std::atan2(y_l, x_l)) > config.heading_threshold) {
    return {0.0, y_l < 0.0 ? -params.max_angular : params.max_angular};
  }
  const double v = state.mode == Mode::Push ? params.push_speed : params.cruise_speed;
  const double kappa = 2.0 * y_l / l2;
  return {v, std::clamp(v * kappa, -params.max_angular, params.max_angular)};
}

double push_required_force(const ObjectInstance& obj, double g) {
  if (!(obj.mass > 0.0)) {
    throw std::invalid_argument("object mass must be > 0");
  }
  return obj.friction_mu * obj.mass * g;
}

double motor_current(double push_force, const RobotParams& params) {
  if (push_force < 0.0) {
    throw std::invalid_argument("push force must be >= 0");
  }
  return params.current_idle + params.current_per_newton * push_force;
}

Mode transition(Mode mode, EventKind event) {
  if (mode == Mode::Done || mode == Mode::Stuck) {
    return mode;
  }
  switch (event) {
    case EventKind::GoalReached:
      return Mode::Done;
    case EventKind::Stuck:
      return Mode::Stuck;
    case EventKind::CurrentLimitExceeded:
      return Mode::ReplanWait;
    case EventKind::PushStarted:
      return mode == Mode::ReplanWait ? mode : Mode::Push;
    case EventKind::PathOpened:
      return Mode::Follow;
    case EventKind::ReplanRequested:
    case EventKind::None:
      return mode;
  }
  return mode;
}

PushController::PushController(RobotParams params, ControllerConfig config)
    : params_(params), config_(config) {
  validate(params_);
  if (config_.replan_period_ticks < 1 || config_.limit_debounce < 1 ||
      config_.max_failed_plans < 1) {
    throw std::invalid_argument("controller periods and counts must be >= 1");
  }
}

void PushController::apply(RobotState& state, const ControlEvent& event) {
  state.mode = transition(state.mode, event.kind);
  switch (event.kind) {
    case EventKind::PushStarted:
      if (state.mode == Mode::Push) {
        state.push_contact = event.object_id;
        ticks_since_replan_ = 0;
      }
      break;
    case EventKind::PathOpened:
    case EventKind::CurrentLimitExceeded:
    case EventKind::GoalReached:
    case EventKind::Stuck:
      state.push_contact.reset();
      break;
    case EventKind::ReplanRequested:
    case EventKind::None:
      break;
  }
}

TickOutput PushController::tick(RobotState& state, const PlannedPath& path,
                                const WorldView& world) {
  TickOutput out;
  if (state.mode == Mode::Done || state.mode == Mode::Stuck) {
    return out;
  }
  const bool driving =
      state.mode == Mode::Follow || state.mode == Mode::Rotate || state.mode == Mode::Push;

  // Candidates in priority order; the first one wins.
  std::vector<ControlEvent> candidates;
  if ((state.pose.position() - config_.goal).norm() <= config_.goal_tolerance) {
    candidates.push_back({EventKind::GoalReached, std::nullopt});
  }
  over_limit_ticks_ = (driving && state.current > params_.current_limit) ? over_limit_ticks_ + 1 : 0;
  if (over_limit_ticks_ >= config_.limit_debounce) {
    candidates.push_back(
        {EventKind::CurrentLimitExceeded, state.loaded_by ? state.loaded_by : state.push_contact});
  }
  if (pending_ && pending_->kind == EventKind::Stuck) {
    candidates.push_back(*pending_);
  }
  if ((state.mode == Mode::Follow || state.mode == Mode::Rotate) && !path.empty()) {
    const auto blocking = first_blocking_object(world.costmap(), path, state.pose);
    if (blocking &&
        path_enters_footprint(world.costmap(), path, blocking->object_id,
                              nearest_waypoint(path, state.pose.position()))) {
      const auto gap = world.clearance_to(blocking->object_id);
      if (gap && *gap <= config_.contact_tolerance) {
        candidates.push_back({EventKind::PushStarted, blocking->object_id});
      }
    }
  }
  if (state.mode == Mode::Push || state.mode == Mode::ReplanWait || path.empty()) {
    if (++ticks_since_replan_ >= config_.replan_period_ticks) {
      candidates.push_back({EventKind::ReplanRequested, std::nullopt});
    }
  }
  if (pending_ && pending_->kind != EventKind::Stuck) {
    candidates.push_back(*pending_);
  }

  if (!candidates.empty()) {
    out.event = candidates.front();
    if (pending_ && *pending_ == out.event) {
      pending_.reset();
    }
    if (out.event.kind == EventKind::ReplanRequested) {
      ticks_since_replan_ = 0;
    }
    if (out.event.kind == EventKind::CurrentLimitExceeded) {
      over_limit_ticks_ = 0;
      ticks_since_replan_ = 0;
      pending_.reset();
    }
    apply(state, out.event);
  }

  if (state.mode == Mode::Follow || state.mode == Mode::Rotate || state.mode == Mode::Push) {
    if (!path.empty()) {
      out.cmd = pure_pursuit_step(state, path, params_, config_.pursuit);
    }
    if (state.mode != Mode::Push) {
      state.mode = out.cmd.v == 0.0 && out.cmd.omega != 0.0 ? Mode::Rotate : Mode::Follow;
    }
  }
  return out;
}

void PushController::on_plan(RobotState& state, const PlannedPath& path, const WorldView& world) {
  failed_plans_ = 0;
  ticks_since_replan_ = 0;
  if (state.mode == Mode::Push && state.push_contact) {
    const std::size_t from = nearest_waypoint(path, state.pose.position());
    if (!path_enters_footprint(world.costmap(), path, *state.push_contact, from)) {
      pending_ = ControlEvent{EventKind::PathOpened, state.push_contact};
    }
  } else if (state.mode == Mode::ReplanWait) {
    pending_ = ControlEvent{EventKind::PathOpened, std::nullopt};
  }
}

void PushController::on_plan_failed(RobotState& state) {
  (void)state;
  if (++failed_plans_ >= config_.max_failed_plans) {
    pending_ = ControlEvent{EventKind::Stuck, std::nullopt};
  }
}

}  // namespace namo
