#include "namo/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "namo/contacts.hpp"
#include "namo/kinematics.hpp"

namespace namo {

const char* to_string(PerceptionMode m) {
  return m == PerceptionMode::Rendered ? "rendered" : "oracle";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success:
      return "success";
    case Outcome::Stuck:
      return "stuck";
    case Outcome::MaxTicks:
      return "max_ticks";
  }
  return "?";
}

RenderScene make_render_scene(const Scenario& scenario, const std::vector<ObjectInstance>& objects,
                              const SimulationOptions& options) {
  RenderScene scene;
  for (const Polygon& wall : scenario.map.static_polygons) {
    scene.prisms.push_back({0, wall, options.wall_height});
  }
  for (const ObjectInstance& obj : objects) {
    scene.prisms.push_back({obj.id, footprint_world(obj), options.object_height});
  }
  return scene;
}

std::map<GridIndex, int> perception_tick(const Scenario& scenario,
                                         const std::vector<ObjectInstance>& objects,
                                         const Pose2D& robot_pose,
                                         const SimulationOptions& options) {
  const RenderedView view = render_view(make_render_scene(scenario, objects, options),
                                        options.camera, options.mount, robot_pose);
  return perceive_cells(view.depth, view.mask, options.camera, options.mount, robot_pose,
                        scenario.map.grid(), options.perception_params);
}

double trajectory_length(const std::vector<TrajectoryRow>& rows) {
  double total = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    total += (rows[i].pose.position() - rows[i - 1].pose.position()).norm();
  }
  return total;
}

namespace {

class Simulation final : public WorldView {
 public:
  Simulation(const Scenario& scenario, const SimulationOptions& options)
      : scenario_(scenario),
        options_(options),
        grid_(scenario.map.grid()),
        map_(grid_, scenario.robot.radius + options.inflation_margin),
        objects_(scenario.objects),
        controller_(scenario.robot, controller_config()),
        max_ticks_(options.max_ticks.value_or(scenario.sim.max_ticks)) {
    for (const Polygon& wall : scenario_.map.static_polygons) {
      const auto cells = rasterize_polygon(grid_, wall);
      map_.set_static(cells);
    }
    robot_.pose = scenario_.start;
    robot_.mode = Mode::Follow;
    best_remaining_ = std::numeric_limits<double>::infinity();
  }

  const LayeredCostmap& costmap() const override { return map_; }

  std::optional<double> clearance_to(int id) const override {
    const ObjectInstance* obj = find_object(id);
    if (obj == nullptr) {
      return std::nullopt;
    }
    return distance_to_polygon(robot_.pose.position(), footprint_world(*obj)) -
           scenario_.robot.radius;
  }

  SimulationResult run(const FrameHook& hook) {
    log_row(0, {}, {});
    if (hook) {
      hook(snapshot(0));
    }
    for (int tick = 1; tick <= max_ticks_ && !outcome_; ++tick) {
      step(tick);
      if (hook) {
        hook(snapshot(tick));
      }
    }
    return finish();
  }

 private:
  ControllerConfig controller_config() const {
    ControllerConfig c;
    c.pursuit.lookahead = options_.controller.lookahead;
    c.pursuit.heading_threshold = options_.controller.heading_threshold;
    c.goal = scenario_.goal.position;
    c.goal_tolerance = scenario_.goal.tolerance_m;
    c.replan_period_ticks =
        std::max(1, static_cast<int>(std::lround(options_.controller.replan_period_s /
                                                 scenario_.sim.dt_s)));
    c.limit_debounce = options_.controller.limit_debounce;
    c.max_failed_plans = options_.controller.max_failed_plans;
    c.contact_tolerance = options_.controller.contact_tolerance;
    return c;
  }

  FrameSnapshot snapshot(int tick) const {
    return {tick, scenario_, map_, path_, objects_, robot_};
  }

  const ObjectInstance* find_object(int id) const {
    for (const ObjectInstance& o : objects_) {
      if (o.id == id) {
        return &o;
      }
    }
    return nullptr;
  }

  ObjectInstance* find_object(int id) {
    return const_cast<ObjectInstance*>(std::as_const(*this).find_object(id));
  }

  double goal_distance() const {
    return (robot_.pose.position() - scenario_.goal.position).norm();
  }

  /// Distance still to go: along the current path when there is one, so a
  /// detour that leads away from the goal still counts as progress.
  double remaining_distance() const {
    if (path_.empty()) {
      return goal_distance();
    }
    const std::size_t i = nearest_waypoint(path_, robot_.pose.position());
    double d = (path_.waypoints[i] - robot_.pose.position()).norm();
    for (std::size_t k = i + 1; k < path_.waypoints.size(); ++k) {
      d += (path_.waypoints[k] - path_.waypoints[k - 1]).norm();
    }
    return d;
  }

  bool is_fatal_object(const ObjectInstance& obj) const {
    return !obj.cls.movable || tripped_.contains(obj.id);
  }

  void perceive(bool initial) {
    if (options_.perception == PerceptionMode::Oracle) {
      for (const ObjectInstance& obj : objects_) {
        map_.upsert_object(obj.id, obj.cls, rasterize_polygon(grid_, footprint_world(obj)));
      }
    } else {
      std::vector<Pose2D> views{robot_.pose};
      if (initial) {
        for (int k = 1; k < options_.initial_scan_views; ++k) {
          const double turn = 2.0 * kPi * k / options_.initial_scan_views;
          views.push_back(Pose2D::make(robot_.pose.x, robot_.pose.y, robot_.pose.theta + turn));
        }
      }
      perceive_rendered(views);
    }
    for (int id : tripped_) {
      if (map_.has_object(id)) {
        map_.mark_object_unmovable(id);
      }
    }
    map_.inflate_and_compose();
  }

  /// Seen cells are merged with remembered ones. A remembered cell is
  /// dropped once some view shows bare floor there or the robot stands on
  /// it, so objects that left a spot do not linger.
  void perceive_rendered(const std::vector<Pose2D>& views) {
    const RenderScene scene = make_render_scene(scenario_, objects_, options_);
    std::vector<RenderedView> rendered;
    std::map<int, std::set<GridIndex>> observed;
    for (const Pose2D& pose : views) {
      rendered.push_back(render_view(scene, options_.camera, options_.mount, pose));
      const RenderedView& view = rendered.back();
      const auto cells = perceive_cells(view.depth, view.mask, options_.camera, options_.mount,
                                        pose, grid_, options_.perception_params);
      for (const auto& [cell, id] : cells) {
        observed[id].insert(cell);
      }
    }
    std::set<int> ids;
    for (const auto& [id, cells] : observed) {
      ids.insert(id);
    }
    for (const auto& [id, points] : memory_) {
      ids.insert(id);
    }
    for (int id : ids) {
      const ObjectInstance* obj = find_object(id);
      if (obj == nullptr) {
        continue;
      }
      std::set<GridIndex>& seen = observed[id];
      std::map<GridIndex, Vec2> next;
      for (const GridIndex& c : seen) {
        next.emplace(c, grid_.cell_center(c));
      }
      for (const Vec2& p : memory_[id]) {
        const auto cell = grid_.world_to_cell(p);
        if (!cell || next.contains(*cell) ||
            (p - robot_.pose.position()).norm() <= scenario_.robot.radius) {
          continue;
        }
        bool cleared = false;
        for (std::size_t v = 0; v < views.size() && !cleared; ++v) {
          cleared = floor_visible(rendered[v].depth, rendered[v].mask, options_.camera,
                                  options_.mount, views[v], grid_.cell_center(*cell));
        }
        if (!cleared) {
          next.emplace(*cell, p);
        }
      }
      std::vector<Vec2>& points = memory_[id];
      std::vector<GridIndex> cells;
      points.clear();
      for (const auto& [cell, p] : next) {
        cells.push_back(cell);
        points.push_back(p);
      }
      map_.upsert_object(id, obj->cls, cells);
    }
  }

  /// True when the map changed under the remaining path in a way that makes
  /// it unsafe or more expensive than when it was planned.
  bool path_invalidated() const {
    if (path_.empty()) {
      return false;
    }
    const bool pushing = robot_.mode == Mode::Push;
    for (std::size_t i = nearest_waypoint(path_, robot_.pose.position()); i < path_.cells.size();
         ++i) {
      const CostCell& c = map_.composed(path_.cells[i]);
      if (c.fatal() || (!pushing && c.cost > planned_costs_[i])) {
        return true;
      }
    }
    return false;
  }

  void plan() {
    if (plans_ > 0) {
      ++replans_;
    }
    ++plans_;
    const GridIndex goal = map_.world_to_cell(scenario_.goal.position);
    GridIndex start = map_.world_to_cell(robot_.pose.position());
    PlanResult result = plan_astar(map_, start, goal);
    if (result.status == PlanStatus::StartBlocked) {
      // The robot can end up inside fresh inflation; leave via the closest
      // free cell.
      if (auto alt = nearest_traversable_cell(map_, start, 10)) {
        start = *alt;
        result = plan_astar(map_, start, goal);
      }
    }
    if (result.ok()) {
      path_ = std::move(result.path);
      planned_costs_.clear();
      for (const GridIndex& c : path_.cells) {
        planned_costs_.push_back(map_.composed(c).cost);
      }
      controller_.on_plan(robot_, path_, *this);
    } else {
      path_ = {};
      planned_costs_.clear();
      controller_.on_plan_failed(robot_);
    }
  }

  void step(int tick) {
    bool need_plan = plans_ == 0;
    if ((tick - 1) % scenario_.sim.perception_period_ticks == 0) {
      perceive(tick == 1);
      if (robot_.mode != Mode::ReplanWait && path_invalidated()) {
        need_plan = true;
      }
    }
    if (need_plan) {
      plan();
    }

    const TickOutput out = controller_.tick(robot_, path_, *this);
    switch (out.event.kind) {
      case EventKind::CurrentLimitExceeded:
        if (out.event.object_id) {
          const int id = *out.event.object_id;
          tripped_.insert(id);
          if (map_.has_object(id)) {
            map_.mark_object_unmovable(id);
          }
          map_.inflate_and_compose();
          if (auto it = record_index_.find(id); it != record_index_.end()) {
            records_[it->second].limit_tripped = true;
          }
        }
        plan();
        // Each object trips once, so this reset cannot repeat forever.
        best_remaining_ = std::numeric_limits<double>::infinity();
        break;
      case EventKind::ReplanRequested:
        plan();
        break;
      case EventKind::PushStarted:
        if (out.event.object_id && !record_index_.contains(*out.event.object_id)) {
          record_index_[*out.event.object_id] = records_.size();
          records_.push_back({*out.event.object_id, 0.0, 0.0, false});
        }
        break;
      case EventKind::GoalReached:
        outcome_ = Outcome::Success;
        break;
      case EventKind::Stuck:
        outcome_ = Outcome::Stuck;
        break;
      case EventKind::PathOpened:
      case EventKind::None:
        break;
    }

    std::vector<int> contacts;
    move_robot(out.cmd, contacts);

    ControlEvent event = out.event;
    if (!outcome_) {
      if (remaining_distance() < best_remaining_ - 0.01) {
        best_remaining_ = remaining_distance();
        last_progress_tick_ = tick;
      } else if (tick - last_progress_tick_ > options_.watchdog_ticks) {
        outcome_ = Outcome::Stuck;
        robot_.mode = transition(robot_.mode, EventKind::Stuck);
        if (event.kind == EventKind::None) {
          event = {EventKind::Stuck, std::nullopt};
        }
      }
    }
    ticks_ = tick;
    log_row(tick, event, contacts);
  }

  void move_robot(const VelocityCommand& cmd, std::vector<int>& contacts) {
    const double dt = scenario_.sim.dt_s;
    const Pose2D previous = robot_.pose;
    const Pose2D proposed = step_kinematics(previous, cmd, dt);

    std::vector<ContactBody> bodies;
    bodies.reserve(objects_.size());
    for (const ObjectInstance& obj : objects_) {
      bodies.push_back({obj.id, footprint_world(obj), !is_fatal_object(obj)});
    }
    const ContactResult res = resolve_contacts(previous, proposed, scenario_.robot.radius,
                                               scenario_.map.static_polygons, bodies);
    robot_.pose = res.pose;
    contacts = res.contacts;

    double force = 0.0;
    double strongest = -1.0;
    robot_.loaded_by.reset();
    for (const auto& [id, delta] : res.displacements) {
      ObjectInstance* obj = find_object(id);
      obj->pose.x += delta.x;
      obj->pose.y += delta.y;
      if (auto it = memory_.find(id); it != memory_.end()) {
        // The pushed object moves with the robot; carry its map along.
        for (Vec2& p : it->second) {
          p += delta;
        }
      }
      const double f = push_required_force(*obj);
      force += f;
      if (f > strongest) {
        strongest = f;
        robot_.loaded_by = id;
      }
      if (auto it = record_index_.find(id); it != record_index_.end()) {
        records_[it->second].push_distance_m += delta.norm();
      }
    }
    const RobotParams& rp = scenario_.robot;
    const bool moving = cmd.v != 0.0 || cmd.omega != 0.0;
    double current = moving ? motor_current(force, rp) : 0.0;
    if (moving && !res.blocked.empty()) {
      current = std::max(current, options_.stall_current_factor * rp.current_limit);
      if (!robot_.loaded_by) {
        robot_.loaded_by = res.blocked.front();
      }
    }
    robot_.current = current;
    robot_.v = cmd.v;
    robot_.omega = cmd.omega;
    if (robot_.loaded_by) {
      if (auto it = record_index_.find(*robot_.loaded_by); it != record_index_.end()) {
        PushRecord& r = records_[it->second];
        r.max_current_a = std::max(r.max_current_a, current);
      }
    }

    std::vector<Polygon> fatal = scenario_.map.static_polygons;
    for (const ObjectInstance& obj : objects_) {
      if (is_fatal_object(obj)) {
        fatal.push_back(footprint_world(obj));
      }
    }
    const double pen = max_penetration(robot_.pose.position(), rp.radius, fatal);
    max_penetration_ = std::max(max_penetration_, pen);
    if (pen > 1e-6) {
      ++safety_violations_;
    }
  }

  void log_row(int tick, const ControlEvent& event, std::vector<int> contacts) {
    TrajectoryRow row;
    row.tick = tick;
    row.t = tick * scenario_.sim.dt_s;
    row.pose = robot_.pose;
    row.v = robot_.v;
    row.omega = robot_.omega;
    row.mode = robot_.mode;
    row.current = robot_.current;
    row.event = event.kind;
    row.object_id = event.object_id;
    if (!row.object_id && robot_.mode == Mode::Push) {
      row.object_id = robot_.push_contact;
    }
    row.contacts = std::move(contacts);
    rows_.push_back(std::move(row));
  }

  SimulationResult finish() {
    SimulationReport report;
    report.outcome = outcome_.value_or(Outcome::MaxTicks);
    report.success = report.outcome == Outcome::Success;
    report.ticks = ticks_;
    report.sim_time_s = ticks_ * scenario_.sim.dt_s;
    report.path_length_m = trajectory_length(rows_);
    report.replans = replans_;
    report.pushes = records_;
    report.final_pose = robot_.pose;
    report.safety_violations = safety_violations_;
    report.max_penetration_m = max_penetration_;
    return {std::move(report), std::move(rows_), map_, path_};
  }

  const Scenario& scenario_;
  const SimulationOptions& options_;
  GridGeometry grid_;
  LayeredCostmap map_;
  std::vector<ObjectInstance> objects_;
  PushController controller_;
  int max_ticks_;

  RobotState robot_;
  PlannedPath path_;
  std::vector<std::uint8_t> planned_costs_;
  /// Remembered object surface points, moved along with pushed objects.
  std::map<int, std::vector<Vec2>> memory_;
  std::set<int> tripped_;

  int plans_{0};
  int replans_{0};
  int ticks_{0};
  std::optional<Outcome> outcome_;
  double best_remaining_{0.0};
  int last_progress_tick_{0};
  int safety_violations_{0};
  double max_penetration_{0.0};
  std::vector<PushRecord> records_;
  std::map<int, std::size_t> record_index_;
  std::vector<TrajectoryRow> rows_;
};

}  // namespace

SimulationResult run_scenario(const Scenario& scenario, const SimulationOptions& options,
                              const FrameHook& hook) {
  Simulation sim(scenario, options);
  return sim.run(hook);
}

void write_trajectory_csv(const std::vector<TrajectoryRow>& rows, std::ostream& out) {
  out << "tick,t,x,y,theta,v,omega,mode,current,event,object_id\n";
  char buf[256];
  for (const TrajectoryRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.3f,%.10f,%.10f,%.10f,%.6f,%.6f,%s,%.6f,%s,", r.tick, r.t,
                  r.pose.x, r.pose.y, r.pose.theta, r.v, r.omega, to_string(r.mode), r.current,
                  to_string(r.event));
    out << buf;
    if (r.object_id) {
      out << *r.object_id;
    }
    out << '\n';
  }
}

void write_report_json(const SimulationReport& report, std::ostream& out) {
  nlohmann::ordered_json j;
  j["success"] = report.success;
  j["outcome"] = to_string(report.outcome);
  j["ticks"] = report.ticks;
  j["sim_time_s"] = report.sim_time_s;
  j["path_length_m"] = report.path_length_m;
  j["replans"] = report.replans;
  j["pushes"] = nlohmann::ordered_json::array();
  for (const PushRecord& p : report.pushes) {
    nlohmann::ordered_json e;
    e["object_id"] = p.object_id;
    e["push_distance_m"] = p.push_distance_m;
    e["max_current_a"] = p.max_current_a;
    e["limit_tripped"] = p.limit_tripped;
    j["pushes"].push_back(std::move(e));
  }
  j["final_pose"] = {{"x", report.final_pose.x},
                     {"y", report.final_pose.y},
                     {"theta", report.final_pose.theta}};
  j["safety_violations"] = report.safety_violations;
  out << j.dump(2) << '\n';
}

namespace {

constexpr double kSvgScale = 100.0;

std::string svg_points(const Polygon& poly, double height_m) {
  std::string s;
  char buf[64];
  for (const Vec2& p : poly) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", p.x * kSvgScale, (height_m - p.y) * kSvgScale);
    s += buf;
  }
  return s;
}

const char* object_fill(const ObjectInstance& obj, const LayeredCostmap& map) {
  if (!obj.cls.movable || (map.has_object(obj.id) && map.is_marked_unmovable(obj.id))) {
    return "#8c2d2d";
  }
  return "#c9a46b";
}

}  // namespace

void write_svg_frame(const FrameSnapshot& f, std::ostream& out) {
  const double w = f.scenario.map.width_m;
  const double h = f.scenario.map.height_m;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                w * kSvgScale, h * kSvgScale, w * kSvgScale, h * kSvgScale);
  out << buf;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double res = f.costmap.resolution();
  for (int r = 0; r < f.costmap.height(); ++r) {
    for (int c = 0; c < f.costmap.width(); ++c) {
      const CostCell& cell = f.costmap.composed({c, r});
      if (cell.cost == 0) {
        continue;
      }
      const char* colour = cell.fatal() ? "#404040" : "#e07b00";
      const double opacity = cell.fatal() ? 0.25 : 0.15 + 0.6 * cell.cost / 254.0;
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\" "
                    "fill-opacity=\"%.2f\"/>\n",
                    c * res * kSvgScale, (h - (r + 1) * res) * kSvgScale, res * kSvgScale,
                    res * kSvgScale, colour, opacity);
      out << buf;
    }
  }
  for (const Polygon& wall : f.scenario.map.static_polygons) {
    out << "<polygon points=\"" << svg_points(wall, h) << "\" fill=\"#202020\"/>\n";
  }
  for (const ObjectInstance& obj : f.objects) {
    out << "<polygon points=\"" << svg_points(footprint_world(obj), h) << "\" fill=\""
        << object_fill(obj, f.costmap) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }
  if (!f.path.empty()) {
    out << "<polyline points=\"" << svg_points(f.path.waypoints, h)
        << "\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\"/>\n";
  }
  const Vec2 goal = f.scenario.goal.position;
  std::snprintf(buf, sizeof(buf),
                "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"none\" stroke=\"green\" "
                "stroke-width=\"2\"/>\n",
                goal.x * kSvgScale, (h - goal.y) * kSvgScale,
                f.scenario.goal.tolerance_m * kSvgScale);
  out << buf;
  const Pose2D& p = f.robot.pose;
  const double r = f.scenario.robot.radius;
  std::snprintf(buf, sizeof(buf),
                "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"#3c8dde\" fill-opacity=\"0.7\" "
                "stroke=\"black\"/>\n",
                p.x * kSvgScale, (h - p.y) * kSvgScale, r * kSvgScale);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" "
                "stroke-width=\"2\"/>\n",
                p.x * kSvgScale, (h - p.y) * kSvgScale, (p.x + r * std::cos(p.theta)) * kSvgScale,
                (h - p.y - r * std::sin(p.theta)) * kSvgScale);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"16\">tick %d  %s  "
                "%.2f A</text>\n",
                f.tick, to_string(f.robot.mode), f.robot.current);
  out << buf;
  out << "</svg>\n";
}

}  // namespace namo
