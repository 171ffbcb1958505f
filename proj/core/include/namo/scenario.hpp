#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "namo/geometry.hpp"
#include "namo/grid.hpp"
#include "namo/world.hpp"

namespace namo {

/// Raised for unreadable or invalid scenario files. what() lists every
/// problem found, one "field: message" per line.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct MapSpec {
  double width_m{0.0};
  double height_m{0.0};
  double resolution{0.05};
  /// Convex CCW world-frame obstacles.
  std::vector<Polygon> static_polygons;

  GridGeometry grid() const;
};

struct GoalSpec {
  Vec2 position;
  double tolerance_m{0.15};
};

struct SimSettings {
  double dt_s{0.05};
  int max_ticks{3000};
  int perception_period_ticks{4};
  /// Reserved for noise models; nothing consumes it yet.
  std::uint64_t seed{0};
};

struct Scenario {
  std::string name;
  MapSpec map;
  RobotParams robot;
  Pose2D start;
  GoalSpec goal;
  ClassTable classes{ClassTable::defaults()};
  std::vector<ObjectInstance> objects;
  SimSettings sim;
};

/// Parses and validates a format-1 scenario document. Unknown fields are
/// errors. `name` labels the scenario in messages.
Scenario parse_scenario(std::string_view json_text, std::string name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Checks cross-field invariants (start and goal inside the map and off
/// walls, unique ids, positive dt). Returns the problems found.
std::vector<std::string> check_scenario(const Scenario& scenario);

}  // namespace namo
