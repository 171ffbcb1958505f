#include <gtest/gtest.h>

#include <random>

#include "namo/control.hpp"
#include "namo/kinematics.hpp"

using namespace namo;

namespace {

PlannedPath straight_path(Vec2 from, Vec2 to, int n) {
  PlannedPath p;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    p.waypoints.push_back(from + (to - from) * t);
    p.cells.push_back({i, 0});
  }
  return p;
}

// Single-waypoint path: the lookahead point is that waypoint.
PlannedPath point_path(Vec2 p) {
  PlannedPath out;
  out.waypoints = {p};
  out.cells = {{0, 0}};
  return out;
}

class FakeWorld : public WorldView {
 public:
  FakeWorld() : map_({40, 10, 0.05, {}}, 0.0) { map_.inflate_and_compose(); }
  const LayeredCostmap& costmap() const override { return map_; }
  std::optional<double> clearance_to(int id) const override {
    auto it = gaps_.find(id);
    if (it == gaps_.end()) return std::nullopt;
    return it->second;
  }
  LayeredCostmap map_;
  std::map<int, double> gaps_;
};

ObjectInstance box(double mass, double mu) {
  ObjectInstance o;
  o.id = 1;
  o.cls = ClassTable::defaults().at(kBoxCardboard);
  o.footprint = make_rectangle(-0.1, -0.1, 0.1, 0.1);
  o.mass = mass;
  o.friction_mu = mu;
  return o;
}

}  // namespace

TEST(PurePursuit, OnPathGoesStraight) {
  RobotState s;
  const VelocityCommand cmd = pure_pursuit_step(s, point_path({0.5, 0.0}), RobotParams{});
  EXPECT_DOUBLE_EQ(cmd.v, 0.4);
  EXPECT_DOUBLE_EQ(cmd.omega, 0.0);
}

TEST(PurePursuit, RotatesInPlaceBeyondThreshold) {
  RobotState s;
  const VelocityCommand left = pure_pursuit_step(s, point_path({0.0, 0.5}), RobotParams{});
  EXPECT_EQ(left.v, 0.0);
  EXPECT_DOUBLE_EQ(left.omega, 1.5);
  const VelocityCommand right = pure_pursuit_step(s, point_path({-0.1, -0.5}), RobotParams{});
  EXPECT_EQ(right.v, 0.0);
  EXPECT_DOUBLE_EQ(right.omega, -1.5);
}

TEST(PurePursuit, CurvatureByHand) {
  RobotState s;
  RobotParams params;
  params.max_angular = 10.0;
  const VelocityCommand cmd = pure_pursuit_step(s, point_path({0.3536, 0.3536}), params);
  const double kappa = 2.0 * 0.3536 / (0.3536 * 0.3536 * 2.0);
  EXPECT_NEAR(kappa, 2.8284, 1e-3);
  EXPECT_NEAR(cmd.omega, 0.4 * kappa, 1e-12);
}

TEST(PurePursuit, PushModeUsesPushSpeedAndEmptyPathThrows) {
  RobotState s;
  s.mode = Mode::Push;
  EXPECT_DOUBLE_EQ(pure_pursuit_step(s, point_path({0.5, 0.0}), RobotParams{}).v, 0.15);
  EXPECT_THROW(pure_pursuit_step(s, PlannedPath{}, RobotParams{}), std::invalid_argument);
}

TEST(PurePursuit, LookaheadPointWalksArcLength) {
  const PlannedPath p = straight_path({0, 0}, {2, 0}, 40);
  const Vec2 l = lookahead_point(p, {0.0, 0.1}, 0.5);
  EXPECT_NEAR(l.x, 0.5, 1e-12);
  EXPECT_NEAR(lookahead_point(p, {1.9, 0.0}, 0.5).x, 2.0, 1e-12);
}

TEST(PurePursuitProperty, CommandsAlwaysBounded) {
  std::mt19937 rng(89);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const RobotParams params;
  for (int i = 0; i < 5000; ++i) {
    RobotState s;
    s.pose = Pose2D::make(u(rng), u(rng), u(rng));
    s.mode = i % 3 == 0 ? Mode::Push : Mode::Follow;
    const VelocityCommand cmd = pure_pursuit_step(s, point_path({u(rng), u(rng)}), params);
    EXPECT_GE(cmd.v, 0.0);
    EXPECT_LE(cmd.v, s.mode == Mode::Push ? params.push_speed : params.cruise_speed);
    EXPECT_LE(std::abs(cmd.omega), params.max_angular);
  }
}

TEST(PurePursuitProperty, CrossTrackConvergesMonotonically) {
  const PlannedPath path = straight_path({0, 0}, {10, 0}, 200);
  const RobotParams params;
  RobotState s;
  s.pose = Pose2D::make(0.0, 0.2, 0.0);
  std::vector<double> err = {0.2};
  for (int tick = 0; tick < 100; ++tick) {
    const VelocityCommand cmd = pure_pursuit_step(s, path, params);
    s.pose = step_kinematics(s.pose, cmd, 0.05);
    err.push_back(std::abs(s.pose.y));
  }
  // Monotone decrease until the error is under one cell, and it stays there.
  std::size_t below = 0;
  while (below < err.size() && err[below] >= 0.05) ++below;
  ASSERT_LT(below, err.size());
  EXPECT_LE(below * 0.05, 5.0);
  for (std::size_t i = 2; i <= below; ++i) EXPECT_LE(err[i], err[i - 1]) << "tick " << i;
  for (std::size_t i = below; i < err.size(); ++i) EXPECT_LT(err[i], 0.05) << "tick " << i;
}

TEST(PurePursuitProperty, SmallOvershootOfUnderdampedTracking) {
  // Linearized about the path, y'' + (2/L) y' + (2/L^2) y = 0: damping ratio
  // 1/sqrt(2), so the error crosses zero once and overshoots by
  // exp(-pi) ~ 4.3% of the initial offset before settling.
  const PlannedPath path = straight_path({0, 0}, {20, 0}, 400);
  RobotState s;
  s.pose = Pose2D::make(0.0, 0.2, 0.0);
  double most_negative = 0.0;
  for (int tick = 0; tick < 300; ++tick) {
    s.pose = step_kinematics(s.pose, pure_pursuit_step(s, path, RobotParams{}), 0.05);
    most_negative = std::min(most_negative, s.pose.y);
  }
  EXPECT_LT(most_negative, 0.0);
  EXPECT_NEAR(-most_negative / 0.2, std::exp(-kPi), 0.015);
}

TEST(Force, FrictionTimesWeight) {
  EXPECT_NEAR(push_required_force(box(2.0, 0.4)), 7.848, 1e-12);
  EXPECT_NEAR(push_required_force(box(5.0, 0.4)), 19.62, 1e-12);
  EXPECT_EQ(push_required_force(box(5.0, 0.0)), 0.0);
  EXPECT_THROW(push_required_force(box(0.0, 0.4)), std::invalid_argument);
}

TEST(Current, LinearModel) {
  const RobotParams p;
  EXPECT_DOUBLE_EQ(motor_current(0.0, p), 0.5);
  EXPECT_NEAR(motor_current(7.848, p), 4.424, 1e-12);
  EXPECT_LT(motor_current(7.848, p), p.current_limit);
  EXPECT_NEAR(motor_current(19.62, p), 10.31, 1e-12);
  EXPECT_GT(motor_current(19.62, p), p.current_limit);
  EXPECT_THROW(motor_current(-1.0, p), std::invalid_argument);
}

TEST(Transitions, TableIsTotal) {
  for (Mode m : kAllModes) {
    for (EventKind e : kAllEvents) {
      const Mode next = transition(m, e);
      EXPECT_NE(std::string(to_string(next)), "?");
      if (m == Mode::Done || m == Mode::Stuck) EXPECT_EQ(next, m);
    }
  }
  EXPECT_EQ(transition(Mode::Follow, EventKind::PushStarted), Mode::Push);
  EXPECT_EQ(transition(Mode::Push, EventKind::CurrentLimitExceeded), Mode::ReplanWait);
  EXPECT_EQ(transition(Mode::Push, EventKind::PathOpened), Mode::Follow);
  EXPECT_EQ(transition(Mode::ReplanWait, EventKind::PushStarted), Mode::ReplanWait);
  EXPECT_EQ(transition(Mode::Rotate, EventKind::GoalReached), Mode::Done);
  EXPECT_EQ(transition(Mode::Push, EventKind::Stuck), Mode::Stuck);
}

TEST(Controller, RejectsBadConfig) {
  ControllerConfig cfg;
  cfg.replan_period_ticks = 0;
  EXPECT_THROW(PushController(RobotParams{}, cfg), std::invalid_argument);
}

TEST(Controller, GoalReachedEndsInDone) {
  ControllerConfig cfg;
  cfg.goal = {1.0, 0.0};
  PushController ctl(RobotParams{}, cfg);
  FakeWorld world;
  RobotState s;
  const PlannedPath path = straight_path({0, 0}, {1, 0}, 20);
  std::vector<EventKind> events;
  for (int tick = 0; tick < 200 && s.mode != Mode::Done; ++tick) {
    const TickOutput out = ctl.tick(s, path, world);
    events.push_back(out.event.kind);
    EXPECT_TRUE(s.mode == Mode::Follow || s.mode == Mode::Done);
    s.pose = step_kinematics(s.pose, out.cmd, 0.05);
  }
  EXPECT_EQ(s.mode, Mode::Done);
  EXPECT_EQ(events.back(), EventKind::GoalReached);
  const TickOutput after = ctl.tick(s, path, world);
  EXPECT_EQ(after.cmd.v, 0.0);
  EXPECT_EQ(after.event.kind, EventKind::None);
}

TEST(Controller, PushStartsOnContactAndDebouncesCurrent) {
  ControllerConfig cfg;
  cfg.goal = {1.9, 0.025};
  PushController ctl(RobotParams{}, cfg);
  FakeWorld world;
  world.map_.upsert_object(1, ClassTable::defaults().at(kBoxCardboard), {{GridIndex{10, 0}}});
  world.map_.inflate_and_compose();
  PlannedPath path = straight_path({0.025, 0.025}, {0.975, 0.025}, 19);
  for (int i = 0; i < 20; ++i) path.cells[static_cast<std::size_t>(i)] = {i, 0};
  RobotState s;
  s.pose = Pose2D::make(0.3, 0.025, 0.0);

  world.gaps_[1] = 0.2;
  EXPECT_EQ(ctl.tick(s, path, world).event.kind, EventKind::None);
  world.gaps_[1] = 0.01;
  const TickOutput start = ctl.tick(s, path, world);
  EXPECT_EQ(start.event, (ControlEvent{EventKind::PushStarted, 1}));
  EXPECT_EQ(s.mode, Mode::Push);
  EXPECT_EQ(s.push_contact, 1);
  EXPECT_LE(start.cmd.v, RobotParams{}.push_speed);

  // Four ticks over the limit then one under resets the count.
  s.current = 10.31;
  s.loaded_by = 1;
  for (int i = 0; i < 4; ++i) EXPECT_NE(ctl.tick(s, path, world).event.kind, EventKind::CurrentLimitExceeded);
  s.current = 4.0;
  ctl.tick(s, path, world);
  s.current = 10.31;
  int fired_at = -1;
  for (int i = 0; i < 5; ++i) {
    if (ctl.tick(s, path, world).event.kind == EventKind::CurrentLimitExceeded) fired_at = i;
  }
  EXPECT_EQ(fired_at, 4);
  EXPECT_EQ(s.mode, Mode::ReplanWait);
  EXPECT_FALSE(s.push_contact);
}

TEST(Controller, PathOpenedAfterReplanAroundContact) {
  ControllerConfig cfg;
  cfg.goal = {1.9, 0.025};
  PushController ctl(RobotParams{}, cfg);
  FakeWorld world;
  world.map_.upsert_object(1, ClassTable::defaults().at(kBoxCardboard), {{GridIndex{10, 0}}});
  world.map_.inflate_and_compose();
  RobotState s;
  s.mode = Mode::Push;
  s.push_contact = 1;
  // A replanned path that no longer enters the box.
  PlannedPath around = straight_path({0.025, 0.075}, {0.975, 0.075}, 19);
  for (int i = 0; i < 20; ++i) around.cells[static_cast<std::size_t>(i)] = {i, 1};
  ctl.on_plan(s, around, world);
  const TickOutput out = ctl.tick(s, around, world);
  EXPECT_EQ(out.event, (ControlEvent{EventKind::PathOpened, 1}));
  EXPECT_EQ(s.mode, Mode::Follow);
}

TEST(Controller, RepeatedPlanFailuresGiveStuck) {
  ControllerConfig cfg;
  cfg.goal = {1.5, 0.2};
  PushController ctl(RobotParams{}, cfg);
  FakeWorld world;
  RobotState s;
  s.mode = Mode::ReplanWait;
  for (int i = 0; i < cfg.max_failed_plans; ++i) ctl.on_plan_failed(s);
  EXPECT_EQ(ctl.tick(s, PlannedPath{}, world).event.kind, EventKind::Stuck);
  EXPECT_EQ(s.mode, Mode::Stuck);
}

TEST(ControllerProperty, FuzzTicksNeverThrowAndStayBounded) {
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  std::uniform_real_distribution<double> cur(0.0, 12.0);
  std::uniform_int_distribution<int> pick(0, 9);
  const RobotParams params;
  ControllerConfig cfg;
  cfg.goal = {1.5, 0.2};
  FakeWorld world;
  world.map_.upsert_object(1, ClassTable::defaults().at(kBoxCardboard), {{GridIndex{10, 0}, GridIndex{10, 1}}});
  world.map_.inflate_and_compose();
  const PlannedPath path = straight_path({0.025, 0.025}, {1.975, 0.025}, 39);
  for (int run = 0; run < 50; ++run) {
    PushController ctl(params, cfg);
    RobotState s;
    s.pose = Pose2D::make(u(rng), u(rng), u(rng));
    for (int tick = 0; tick < 300; ++tick) {
      s.current = cur(rng);
      s.loaded_by = pick(rng) < 3 ? std::optional<int>(1) : std::nullopt;
      world.gaps_[1] = pick(rng) < 5 ? 0.0 : 1.0;
      switch (pick(rng)) {
        case 0: ctl.on_plan(s, path, world); break;
        case 1: ctl.on_plan_failed(s); break;
        default: break;
      }
      const PlannedPath& p = pick(rng) == 0 ? PlannedPath{} : path;
      TickOutput out;
      ASSERT_NO_THROW(out = ctl.tick(s, p, world));
      EXPECT_GE(out.cmd.v, 0.0);
      EXPECT_LE(out.cmd.v, s.mode == Mode::Push ? params.push_speed : params.cruise_speed);
      EXPECT_LE(std::abs(out.cmd.omega), params.max_angular);
      s.pose = step_kinematics(s.pose, out.cmd, 0.05);
    }
  }
}
