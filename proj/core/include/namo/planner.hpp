#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "namo/costmap.hpp"
#include "namo/geometry.hpp"
#include "namo/grid.hpp"

namespace namo {

/// Exact path cost of the form units + diagonals * sqrt(2). Straight steps
/// and movable surcharges land in `units`, diagonal steps in `diagonals`,
/// so equal-cost paths compare equal regardless of summation order.
struct PathCost {
  std::int64_t units{0};
  std::int64_t diagonals{0};

  double value() const;
  PathCost operator+(const PathCost& o) const { return {units + o.units, diagonals + o.diagonals}; }
  bool operator==(const PathCost&) const = default;
  std::strong_ordering operator<=>(const PathCost& o) const;
};

struct PlannedPath {
  /// Cell centers, start first.
  std::vector<Vec2> waypoints;
  std::vector<GridIndex> cells;
  double total_cost{0.0};
  PathCost exact_cost;
  /// Movable objects the path enters, each once, in first-contact order.
  std::vector<int> crossed_objects;

  bool empty() const { return waypoints.empty(); }
};

struct PlannerConfig {
  /// Cost of one straight step; diagonals cost base_cost * sqrt(2).
  int base_cost{1};
  /// Records the f value of every expanded node, for diagnostics.
  bool record_expansions{false};
};

enum class PlanStatus { Ok, NoPath, StartBlocked };

const char* to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status{PlanStatus::NoPath};
  PlannedPath path;
  std::size_t expansions{0};
  std::vector<double> expanded_f;

  bool ok() const { return status == PlanStatus::Ok; }
};

class BrokenChainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cost of stepping from `from` into the 8-neighbour `to`.
PathCost edge_cost(const LayeredCostmap& map, GridIndex from, GridIndex to, int base_cost = 1);

/// True when a diagonal step squeezes between two fatal cells.
bool cuts_corner(const LayeredCostmap& map, GridIndex from, GridIndex to);

/// 8-connected A* over the composed layer. Fatal cells are untraversable;
/// entering a movable footprint or movable inflation cell costs its carried
/// object cost on top of the step length. Ties on f break on lower h, then
/// row-major cell order. Throws OutOfBoundsError if start or goal lies
/// outside the map.
PlanResult plan_astar(const LayeredCostmap& map, Vec2 start, Vec2 goal,
                      const PlannerConfig& config = {});
PlanResult plan_astar(const LayeredCostmap& map, GridIndex start, GridIndex goal,
                      const PlannerConfig& config = {});

/// Recomputes the cost of a waypoint chain under the planner's cost model.
/// Throws BrokenChainError unless consecutive waypoints are 8-neighbours.
double path_cost(const LayeredCostmap& map, const PlannedPath& path, int base_cost = 1);
PathCost exact_path_cost(const LayeredCostmap& map, const std::vector<GridIndex>& cells,
                         int base_cost = 1);

std::size_t nearest_waypoint(const PlannedPath& path, Vec2 p);

struct BlockingObject {
  int object_id{0};
  std::size_t waypoint_index{0};

  bool operator==(const BlockingObject&) const = default;
};

/// First waypoint, scanning forward from the one nearest the robot, whose
/// cell carries a movable object id.
std::optional<BlockingObject> first_blocking_object(const LayeredCostmap& map,
                                                    const PlannedPath& path,
                                                    const Pose2D& robot_pose);

/// True when the path, from waypoint `from` on, enters a footprint cell of
/// movable object `id` (inflation cells do not count).
bool path_enters_footprint(const LayeredCostmap& map, const PlannedPath& path, int id,
                           std::size_t from = 0);

/// Nearest non-fatal cell within `max_cells` (Chebyshev rings, row-major
/// order within a ring).
std::optional<GridIndex> nearest_traversable_cell(const LayeredCostmap& map, GridIndex from,
                                                  int max_cells);

/// "x,y" per line, start first.
void write_path_csv(const PlannedPath& path, std::ostream& out);

}  // namespace namo
