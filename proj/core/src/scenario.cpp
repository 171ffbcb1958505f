#include "namo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "namo/contacts.hpp"

namespace namo {

using nlohmann::json;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) {
    if (!out.empty()) {
      out += '\n';
    }
    out += l;
  }
  return out;
}

/// Reads the members of one JSON object, recording a problem for every
/// missing, mistyped or unexpected field.
class Fields {
 public:
  Fields(const json& node, std::string path, std::vector<std::string>& problems)
      : node_(node), path_(std::move(path)), problems_(problems) {
    if (!node_.is_object()) {
      fail("", "must be an object");
      valid_ = false;
    }
  }

  Fields(const Fields&) = delete;
  Fields& operator=(const Fields&) = delete;

  ~Fields() {
    if (!valid_) {
      return;
    }
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) {
        fail(key, "unknown field");
      }
    }
  }

  bool valid() const { return valid_; }
  std::string path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* member(std::string_view key, bool required) {
    seen_.insert(std::string(key));
    if (!valid_) {
      return nullptr;
    }
    auto it = node_.find(key);
    if (it == node_.end()) {
      if (required) {
        fail(key, "is required");
      }
      return nullptr;
    }
    return &*it;
  }

  void number(std::string_view key, double& out, bool required = false) {
    if (const json* v = member(key, required)) {
      if (v->is_number()) {
        out = v->get<double>();
        if (!std::isfinite(out)) {
          fail(key, "must be finite");
        }
      } else {
        fail(key, "must be a number");
      }
    }
  }

  template <class Int>
  void integer(std::string_view key, Int& out, bool required = false) {
    if (const json* v = member(key, required)) {
      if (v->is_number_integer()) {
        out = v->get<Int>();
      } else {
        fail(key, "must be an integer");
      }
    }
  }

  void boolean(std::string_view key, bool& out, bool required = false) {
    if (const json* v = member(key, required)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(key, "must be true or false");
      }
    }
  }

  void string(std::string_view key, std::string& out, bool required = false) {
    if (const json* v = member(key, required)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(key, "must be a string");
      }
    }
  }

  void fail(std::string_view key, std::string_view message) {
    const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : path(key);
    problems_.push_back(where + ": " + std::string(message));
  }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string, std::less<>> seen_;
  bool valid_{true};
};

std::optional<Polygon> read_polygon(const json& node, const std::string& path,
                                    std::vector<std::string>& problems) {
  if (!node.is_array() || node.size() < 3) {
    problems.push_back(path + ": must be a list of at least 3 [x, y] points");
    return std::nullopt;
  }
  Polygon poly;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const json& p = node[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      problems.push_back(path + "[" + std::to_string(i) + "]: must be an [x, y] pair of numbers");
      return std::nullopt;
    }
    poly.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (!is_convex_ccw(poly)) {
    problems.push_back(path + ": must be convex with counter-clockwise vertices");
    return std::nullopt;
  }
  return poly;
}

Pose2D read_pose(const json& node, const std::string& path, std::vector<std::string>& problems) {
  Fields f(node, path, problems);
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  f.number("x", x, true);
  f.number("y", y, true);
  f.number("theta", theta);
  return Pose2D::make(x, y, theta);
}

void read_map(const json& node, MapSpec& map, std::vector<std::string>& problems) {
  Fields f(node, "map", problems);
  f.number("width_m", map.width_m, true);
  f.number("height_m", map.height_m, true);
  f.number("resolution", map.resolution);
  if (const json* polys = f.member("static_polygons", false)) {
    if (!polys->is_array()) {
      f.fail("static_polygons", "must be a list of polygons");
    } else {
      for (std::size_t i = 0; i < polys->size(); ++i) {
        if (auto p = read_polygon((*polys)[i], "map.static_polygons[" + std::to_string(i) + "]",
                                  problems)) {
          map.static_polygons.push_back(std::move(*p));
        }
      }
    }
  }
  if (!(map.width_m > 0.0)) {
    f.fail("width_m", "must be > 0");
  }
  if (!(map.height_m > 0.0)) {
    f.fail("height_m", "must be > 0");
  }
  if (!(map.resolution > 0.0)) {
    f.fail("resolution", "must be > 0");
  }
}

void read_robot(const json& node, Scenario& s, std::vector<std::string>& problems) {
  Fields f(node, "robot", problems);
  RobotParams& r = s.robot;
  f.number("radius", r.radius);
  f.number("cruise_speed", r.cruise_speed);
  f.number("push_speed", r.push_speed);
  f.number("max_angular", r.max_angular);
  f.number("wheel_base", r.wheel_base);
  f.number("current_idle", r.current_idle);
  f.number("current_per_newton", r.current_per_newton);
  f.number("current_limit", r.current_limit);
  if (const json* start = f.member("start", true)) {
    s.start = read_pose(*start, "robot.start", problems);
  }
  try {
    validate(r);
  } catch (const std::invalid_argument& e) {
    f.fail("", e.what());
  }
}

void read_goal(const json& node, GoalSpec& goal, std::vector<std::string>& problems) {
  Fields f(node, "goal", problems);
  f.number("x", goal.position.x, true);
  f.number("y", goal.position.y, true);
  f.number("tolerance_m", goal.tolerance_m);
  if (!(goal.tolerance_m > 0.0)) {
    f.fail("tolerance_m", "must be > 0");
  }
}

void read_classes(const json& node, ClassTable& table, std::vector<std::string>& problems) {
  if (!node.is_object()) {
    problems.push_back("classes: must be an object keyed by class name");
    return;
  }
  for (const auto& [name, value] : node.items()) {
    const std::string path = "classes." + name;
    Fields f(value, path, problems);
    ObjectClass cls;
    cls.name = name;
    if (table.contains(name)) {
      cls = table.at(name);
    }
    int cost = cls.move_cost;
    f.boolean("movable", cls.movable, true);
    f.integer("move_cost", cost, true);
    if (cost < 1 || cost > kFatalCost) {
      f.fail("move_cost", "must be in [1, 255]");
      continue;
    }
    cls.move_cost = static_cast<std::uint8_t>(cost);
    try {
      validate(cls);
      table.set(cls);
    } catch (const std::invalid_argument& e) {
      f.fail("", e.what());
    }
  }
}

void read_objects(const json& node, Scenario& s, std::vector<std::string>& problems) {
  if (!node.is_array()) {
    problems.push_back("objects: must be a list");
    return;
  }
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string path = "objects[" + std::to_string(i) + "]";
    Fields f(node[i], path, problems);
    if (!f.valid()) {
      continue;
    }
    ObjectInstance obj;
    std::string cls;
    const std::size_t before = problems.size();
    f.integer("id", obj.id, true);
    f.string("class", cls, true);
    f.number("mass", obj.mass, true);
    f.number("friction", obj.friction_mu, true);
    if (const json* fp = f.member("footprint", true)) {
      if (auto p = read_polygon(*fp, f.path("footprint"), problems)) {
        obj.footprint = std::move(*p);
      }
    }
    if (const json* pose = f.member("pose", true)) {
      obj.pose = read_pose(*pose, f.path("pose"), problems);
    }
    if (obj.id < 1 || obj.id > 65535) {
      f.fail("id", "must be in [1, 65535]");
    }
    if (!cls.empty()) {
      if (!s.classes.contains(cls)) {
        f.fail("class", "unknown class '" + cls + "'");
      } else {
        obj.cls = s.classes.at(cls);
      }
    }
    if (problems.size() != before) {
      continue;
    }
    try {
      validate(obj);
      s.objects.push_back(std::move(obj));
    } catch (const std::invalid_argument& e) {
      f.fail("", e.what());
    }
  }
}

void read_sim(const json& node, SimSettings& sim, std::vector<std::string>& problems) {
  Fields f(node, "sim", problems);
  f.number("dt_s", sim.dt_s);
  f.integer("max_ticks", sim.max_ticks);
  f.integer("perception_period_ticks", sim.perception_period_ticks);
  f.integer("seed", sim.seed);
  if (!(sim.dt_s > 0.0)) {
    f.fail("dt_s", "must be > 0");
  }
  if (sim.max_ticks < 1) {
    f.fail("max_ticks", "must be >= 1");
  }
  if (sim.perception_period_ticks < 1) {
    f.fail("perception_period_ticks", "must be >= 1");
  }
}

bool start_overlaps(const Scenario& s) {
  std::vector<Polygon> outlines = s.map.static_polygons;
  for (const ObjectInstance& o : s.objects) {
    outlines.push_back(footprint_world(o));
  }
  return max_penetration(s.start.position(), s.robot.radius, outlines) > 1e-9;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

GridGeometry MapSpec::grid() const {
  GridGeometry g;
  g.width = static_cast<int>(std::ceil(width_m / resolution - 1e-9));
  g.height = static_cast<int>(std::ceil(height_m / resolution - 1e-9));
  g.resolution = resolution;
  return g;
}

std::vector<std::string> check_scenario(const Scenario& s) {
  std::vector<std::string> problems;
  auto inside = [&](Vec2 p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < s.map.width_m && p.y < s.map.height_m;
  };
  if (!inside(s.start.position())) {
    problems.push_back("robot.start: outside the map");
  } else if (start_overlaps(s)) {
    problems.push_back("robot.start: robot overlaps a static polygon or an object");
  }
  if (!inside(s.goal.position)) {
    problems.push_back("goal: outside the map");
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (!ids.insert(s.objects[i].id).second) {
      problems.push_back("objects[" + std::to_string(i) + "].id: duplicate id " +
                         std::to_string(s.objects[i].id));
    }
  }
  if (!(s.sim.dt_s > 0.0)) {
    problems.push_back("sim.dt_s: must be > 0");
  }
  return problems;
}

Scenario parse_scenario(std::string_view json_text, std::string name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError({name + ": invalid JSON: " + e.what()});
  }
  std::vector<std::string> problems;
  Scenario s;
  s.name = std::move(name);
  {
    Fields root(doc, "", problems);
    if (root.valid()) {
      int format = 0;
      root.integer("format", format, true);
      if (root.member("format", false) && format != 1) {
        root.fail("format", "unsupported version " + std::to_string(format) + " (expected 1)");
      }
      root.string("name", s.name);
      std::string description;
      root.string("description", description);
      if (const json* n = root.member("classes", false)) {
        read_classes(*n, s.classes, problems);
      }
      if (const json* n = root.member("map", true)) {
        read_map(*n, s.map, problems);
      }
      if (const json* n = root.member("robot", true)) {
        read_robot(*n, s, problems);
      }
      if (const json* n = root.member("goal", true)) {
        read_goal(*n, s.goal, problems);
      }
      if (const json* n = root.member("objects", true)) {
        read_objects(*n, s, problems);
      }
      if (const json* n = root.member("sim", false)) {
        read_sim(*n, s.sim, problems);
      }
    }
  }
  if (problems.empty()) {
    problems = check_scenario(s);
  }
  if (!problems.empty()) {
    throw ScenarioError(std::move(problems));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError({path.string() + ": cannot open file"});
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.stem().string());
}

}  // namespace namo
