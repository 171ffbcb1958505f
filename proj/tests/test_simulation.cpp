#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "namo/simulation.hpp"

using namespace namo;

namespace {

std::string fixture(const std::string& name) { return std::string(NAMO_SCENARIO_DIR) + "/" + name + ".json"; }

struct FixtureRun {
  Scenario scenario;
  SimulationResult result;
};

// Each fixture is simulated once per perception mode and shared by the tests.
const FixtureRun& run_of(const std::string& name, PerceptionMode mode) {
  static std::map<std::pair<std::string, PerceptionMode>, FixtureRun> cache;
  auto key = std::make_pair(name, mode);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Scenario s = load_scenario(fixture(name));
    SimulationOptions opt;
    opt.perception = mode;
    SimulationResult result = run_scenario(s, opt);
    it = cache.emplace(key, FixtureRun{std::move(s), std::move(result)}).first;
  }
  return it->second;
}

// Heavy box as the only way through: the far gap is walled off.
Scenario heavy_box_only_gap() {
  Scenario s = load_scenario(fixture("heavy_box"));
  std::vector<Polygon> walls;
  for (const Polygon& p : s.map.static_polygons) {
    const bool divider = p[0].y == 2.4;
    if (!divider) walls.push_back(p);
  }
  walls.push_back(make_rectangle(0.1, 2.4, 1.0, 2.6));
  walls.push_back(make_rectangle(1.7, 2.4, 9.9, 2.6));
  s.map.static_polygons = walls;
  return s;
}

const std::vector<std::string> kFixtures = {"free_corridor", "scenario1_trapped", "scenario2_choice", "heavy_box"};
const std::vector<PerceptionMode> kModes = {PerceptionMode::Rendered, PerceptionMode::Oracle};

std::string csv_of(const SimulationResult& r) {
  std::ostringstream out;
  write_trajectory_csv(r.rows, out);
  return out.str();
}

}  // namespace

TEST(PerceptionTick, NoObjectsInView) {
  Scenario s = load_scenario(fixture("free_corridor"));
  EXPECT_TRUE(perception_tick(s, s.objects, s.start, {}).empty());
}

TEST(PerceptionTick, BoxAheadIsSeen) {
  Scenario s = load_scenario(fixture("free_corridor"));
  ObjectInstance box;
  box.id = 4;
  box.cls = s.classes.at(kBoxCardboard);
  box.footprint = make_rectangle(-0.2, -0.2, 0.2, 0.2);
  box.pose = Pose2D::make(s.start.x + 1.5, s.start.y, 0.0);
  const auto cells = perception_tick(s, {box}, s.start, {});
  ASSERT_FALSE(cells.empty());
  for (const auto& [cell, id] : cells) EXPECT_EQ(id, 4);
  // Facing away: nothing.
  EXPECT_TRUE(perception_tick(s, {box}, Pose2D::make(s.start.x, s.start.y, kPi), {}).empty());
}

TEST(Scenarios, FreeCorridorSucceedsWithoutPushes) {
  for (PerceptionMode m : kModes) {
    const auto& r = run_of("free_corridor", m).result.report;
    EXPECT_TRUE(r.success);
    EXPECT_TRUE(r.pushes.empty());
    EXPECT_EQ(r.replans, 0);
  }
}

TEST(Scenarios, TrappedRobotPushesFrontBox) {
  for (PerceptionMode m : kModes) {
    const auto& r = run_of("scenario1_trapped", m).result;
    EXPECT_TRUE(r.report.success) << to_string(m);
    ASSERT_FALSE(r.report.pushes.empty());
    EXPECT_EQ(r.report.pushes[0].object_id, 3);
    EXPECT_GE(r.report.replans, 1);
    EXPECT_EQ(r.report.safety_violations, 0);
    // FOLLOW, then a push on the front box, a replan, then FOLLOW to the goal.
    std::vector<EventKind> events;
    for (const TrajectoryRow& row : r.rows)
      if (row.event != EventKind::None) events.push_back(row.event);
    const auto push = std::find(events.begin(), events.end(), EventKind::PushStarted);
    ASSERT_NE(push, events.end());
    EXPECT_NE(std::find(push, events.end(), EventKind::ReplanRequested), events.end());
    EXPECT_NE(std::find(push, events.end(), EventKind::PathOpened), events.end());
    EXPECT_EQ(events.back(), EventKind::GoalReached);
  }
}

TEST(Scenarios, ChoiceScenarioPushesTheBox) {
  for (PerceptionMode m : kModes) {
    const auto& r = run_of("scenario2_choice", m).result.report;
    EXPECT_TRUE(r.success);
    ASSERT_FALSE(r.pushes.empty());
    EXPECT_EQ(r.pushes[0].object_id, 1);
  }
}

TEST(Scenarios, HeavyBoxTripsLimitThenDetours) {
  for (PerceptionMode m : kModes) {
    const auto& run = run_of("heavy_box", m);
    const auto& r = run.result.report;
    EXPECT_TRUE(r.success);
    ASSERT_FALSE(r.pushes.empty());
    EXPECT_TRUE(r.pushes[0].limit_tripped);
    EXPECT_TRUE(run.result.final_costmap.is_marked_unmovable(1));
    EXPECT_EQ(r.safety_violations, 0);
  }
}

TEST(Scenarios, HeavyBoxAsOnlyGapEndsStuck) {
  SimulationOptions opt;
  opt.perception = PerceptionMode::Oracle;
  const SimulationResult r = run_scenario(heavy_box_only_gap(), opt);
  EXPECT_EQ(r.report.outcome, Outcome::Stuck);
  EXPECT_FALSE(r.report.success);
  bool tripped = false;
  for (const TrajectoryRow& row : r.rows) tripped = tripped || row.event == EventKind::CurrentLimitExceeded;
  EXPECT_TRUE(tripped);
  EXPECT_EQ(r.rows.back().mode, Mode::Stuck);
  EXPECT_EQ(r.report.safety_violations, 0);
}

TEST(SimulationProperty, SafetyOnAllFixtures) {
  for (const auto& name : kFixtures)
    for (PerceptionMode m : kModes) {
      const auto& r = run_of(name, m).result.report;
      EXPECT_EQ(r.safety_violations, 0) << name;
      EXPECT_LE(r.max_penetration_m, 1e-6) << name;
    }
}

TEST(SimulationProperty, DeterministicTrajectories) {
  for (const auto& name : kFixtures) {
    const FixtureRun& first = run_of(name, PerceptionMode::Oracle);
    const SimulationResult again = run_scenario(first.scenario, [] {
      SimulationOptions o;
      o.perception = PerceptionMode::Oracle;
      return o;
    }());
    EXPECT_EQ(csv_of(first.result), csv_of(again)) << name;
  }
  const FixtureRun& rendered = run_of("scenario1_trapped", PerceptionMode::Rendered);
  EXPECT_EQ(csv_of(rendered.result), csv_of(run_scenario(rendered.scenario)));
}

TEST(SimulationProperty, EveryPushHasPushModeContact) {
  for (const auto& name : kFixtures)
    for (PerceptionMode m : kModes) {
      const auto& res = run_of(name, m).result;
      for (const PushRecord& p : res.report.pushes) {
        EXPECT_GE(p.push_distance_m, 0.0);
        bool touched = false;
        for (const TrajectoryRow& row : res.rows) {
          touched = touched || (row.mode == Mode::Push &&
                                std::find(row.contacts.begin(), row.contacts.end(), p.object_id) != row.contacts.end());
        }
        EXPECT_TRUE(touched) << name << " object " << p.object_id;
      }
    }
}

TEST(SimulationProperty, PathLengthMatchesTrajectory) {
  for (const auto& name : kFixtures)
    for (PerceptionMode m : kModes) {
      const auto& res = run_of(name, m).result;
      EXPECT_NEAR(res.report.path_length_m, trajectory_length(res.rows), 1e-6) << name;
      // Recomputed from the printed CSV as well.
      std::istringstream in(csv_of(res));
      std::string line;
      std::getline(in, line);
      double len = 0.0, px = 0.0, py = 0.0;
      bool first = true;
      while (std::getline(in, line)) {
        double x = 0.0, y = 0.0;
        std::sscanf(line.c_str(), "%*d,%*f,%lf,%lf", &x, &y);
        if (!first) len += std::hypot(x - px, y - py);
        first = false;
        px = x;
        py = y;
      }
      EXPECT_NEAR(res.report.path_length_m, len, 1e-6) << name;
    }
}

TEST(SimulationProperty, TerminatesInADefinedState) {
  for (const auto& name : kFixtures)
    for (PerceptionMode m : kModes) {
      const auto& run = run_of(name, m);
      const auto& r = run.result.report;
      EXPECT_LE(r.ticks, run.scenario.sim.max_ticks);
      EXPECT_EQ(static_cast<int>(run.result.rows.size()), r.ticks + 1);
      const Mode last = run.result.rows.back().mode;
      switch (r.outcome) {
        case Outcome::Success:
          EXPECT_EQ(last, Mode::Done);
          EXPECT_LE((r.final_pose.position() - run.scenario.goal.position).norm(), run.scenario.goal.tolerance_m);
          break;
        case Outcome::Stuck: EXPECT_EQ(last, Mode::Stuck); break;
        case Outcome::MaxTicks: EXPECT_EQ(r.ticks, run.scenario.sim.max_ticks); break;
      }
    }
}

TEST(SimulationProperty, LoggedCommandsRespectLimits) {
  for (const auto& name : kFixtures)
    for (PerceptionMode m : kModes) {
      const auto& run = run_of(name, m);
      const RobotParams& p = run.scenario.robot;
      for (const TrajectoryRow& row : run.result.rows) {
        EXPECT_GE(row.v, 0.0);
        EXPECT_LE(row.v, p.cruise_speed + 1e-12);
        EXPECT_LE(std::abs(row.omega), p.max_angular + 1e-12);
        if (row.mode == Mode::Push) EXPECT_LE(row.v, p.push_speed + 1e-12);
      }
    }
}

TEST(SimulationProperty, NoSpuriousCurrentTrips) {
  std::vector<std::pair<std::string, SimulationResult>> runs;
  for (const auto& name : kFixtures) runs.emplace_back(name, run_of(name, PerceptionMode::Oracle).result);
  SimulationOptions opt;
  opt.perception = PerceptionMode::Oracle;
  runs.emplace_back("only_gap", run_scenario(heavy_box_only_gap(), opt));
  for (const auto& [name, res] : runs) {
    const double limit = 5.0;
    const int debounce = SimulationOptions{}.controller.limit_debounce;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      if (res.rows[i].event != EventKind::CurrentLimitExceeded) continue;
      // The controller saw the currents logged on the preceding rows.
      ASSERT_GE(i, static_cast<std::size_t>(debounce));
      for (int k = 1; k <= debounce; ++k) EXPECT_GT(res.rows[i - k].current, limit) << name << " row " << i;
    }
  }
}

TEST(Reports, JsonHasStableKeyOrder) {
  const auto& r = run_of("free_corridor", PerceptionMode::Oracle).result.report;
  std::ostringstream out;
  write_report_json(r, out);
  const std::string s = out.str();
  std::size_t last = 0;
  for (const char* key : {"\"success\"", "\"outcome\"", "\"ticks\"", "\"sim_time_s\"", "\"path_length_m\"",
                          "\"replans\"", "\"pushes\"", "\"final_pose\"", "\"safety_violations\""}) {
    const std::size_t at = s.find(key);
    ASSERT_NE(at, std::string::npos) << key;
    EXPECT_GT(at, last) << key;
    last = at;
  }
}

TEST(Reports, CsvHeaderAndSvgFrame) {
  const auto& run = run_of("scenario1_trapped", PerceptionMode::Oracle);
  EXPECT_EQ(csv_of(run.result).substr(0, 54), "tick,t,x,y,theta,v,omega,mode,current,event,object_id\n");
  std::vector<ObjectInstance> objects = run.scenario.objects;
  RobotState robot;
  robot.pose = run.scenario.start;
  const FrameSnapshot frame{0, run.scenario, run.result.final_costmap, run.result.final_path, objects, robot};
  std::ostringstream svg;
  write_svg_frame(frame, svg);
  EXPECT_NE(svg.str().find("<svg"), std::string::npos);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

TEST(Simulation, FrameHookSeesEveryTick) {
  const Scenario s = load_scenario(fixture("free_corridor"));
  SimulationOptions opt;
  opt.perception = PerceptionMode::Oracle;
  opt.max_ticks = 30;
  int calls = 0;
  const SimulationResult r = run_scenario(s, opt, [&](const FrameSnapshot& f) {
    EXPECT_EQ(f.tick, calls);
    ++calls;
  });
  EXPECT_EQ(r.report.outcome, Outcome::MaxTicks);
  EXPECT_EQ(calls, 31);
}
