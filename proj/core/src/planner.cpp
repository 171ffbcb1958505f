#include "namo/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <string>

namespace namo {

double PathCost::value() const {
  return static_cast<double>(units) + static_cast<double>(diagonals) * std::numbers::sqrt2;
}

std::strong_ordering PathCost::operator<=>(const PathCost& o) const {
  // Compare x against y * sqrt(2) without rounding.
  const std::int64_t x = units - o.units;
  const std::int64_t y = o.diagonals - diagonals;
  if (y == 0) {
    return x <=> 0;
  }
  if (x >= 0 && y < 0) {
    return std::strong_ordering::greater;
  }
  if (x <= 0 && y > 0) {
    return std::strong_ordering::less;
  }
  __extension__ using Wide = __int128;
  const Wide x2 = static_cast<Wide>(x) * x;
  const Wide y2 = static_cast<Wide>(y) * y * 2;
  return x > 0 ? (x2 <=> y2) : (y2 <=> x2);
}

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Ok:
      return "ok";
    case PlanStatus::NoPath:
      return "no_path";
    case PlanStatus::StartBlocked:
      return "start_blocked";
  }
  return "?";
}

PathCost edge_cost(const LayeredCostmap& map, GridIndex from, GridIndex to, int base_cost) {
  const bool diagonal = from.col != to.col && from.row != to.row;
  const std::int64_t extra = map.composed(to).movable_cost();
  return diagonal ? PathCost{extra, base_cost} : PathCost{base_cost + extra, 0};
}

bool cuts_corner(const LayeredCostmap& map, GridIndex from, GridIndex to) {
  if (from.col == to.col || from.row == to.row) {
    return false;
  }
  const GridIndex a{to.col, from.row};
  const GridIndex b{from.col, to.row};
  return map.composed(a).fatal() && map.composed(b).fatal();
}

namespace {

struct OpenEntry {
  double f;
  double h;
  GridIndex cell;
  PathCost g;
};

struct OpenAfter {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) {
      return a.f > b.f;
    }
    if (a.h != b.h) {
      return a.h > b.h;
    }
    return a.cell > b.cell;
  }
};

constexpr int kNeighbourDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kNeighbourDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

void fill_crossed_objects(const LayeredCostmap& map, PlannedPath& path) {
  path.crossed_objects.clear();
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    const CostCell& cell = map.composed(path.cells[i]);
    if (cell.movable_cost() > 0 && cell.object_id) {
      const int id = *cell.object_id;
      if (std::find(path.crossed_objects.begin(), path.crossed_objects.end(), id) ==
          path.crossed_objects.end()) {
        path.crossed_objects.push_back(id);
      }
    }
  }
}

}  // namespace

PlanResult plan_astar(const LayeredCostmap& map, Vec2 start, Vec2 goal,
                      const PlannerConfig& config) {
  return plan_astar(map, map.world_to_cell(start), map.world_to_cell(goal), config);
}

PlanResult plan_astar(const LayeredCostmap& map, GridIndex start, GridIndex goal,
                      const PlannerConfig& config) {
  if (!map.in_bounds(start) || !map.in_bounds(goal)) {
    throw OutOfBoundsError("start or goal outside the costmap");
  }
  PlanResult result;
  if (map.composed(start).fatal()) {
    result.status = PlanStatus::StartBlocked;
    return result;
  }
  if (map.composed(goal).fatal()) {
    result.status = PlanStatus::NoPath;
    return result;
  }

  const GridGeometry& grid = map.geometry();
  const std::size_t n = grid.cell_count();
  const double base = static_cast<double>(config.base_cost);
  auto heuristic = [&](GridIndex c) {
    return base * std::hypot(static_cast<double>(c.col - goal.col),
                             static_cast<double>(c.row - goal.row));
  };

  std::vector<PathCost> g(n);
  std::vector<bool> seen(n, false);
  std::vector<bool> closed(n, false);
  std::vector<std::size_t> parent(n, std::numeric_limits<std::size_t>::max());
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenAfter> open;

  const std::size_t start_i = grid.flat(start);
  seen[start_i] = true;
  open.push({heuristic(start), heuristic(start), start, PathCost{}});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const std::size_t i = grid.flat(top.cell);
    if (closed[i] || top.g != g[i]) {
      continue;
    }
    closed[i] = true;
    ++result.expansions;
    if (config.record_expansions) {
      result.expanded_f.push_back(top.f);
    }
    if (top.cell == goal) {
      PlannedPath& path = result.path;
      for (std::size_t k = i; k != std::numeric_limits<std::size_t>::max(); k = parent[k]) {
        path.cells.push_back(grid.unflat(k));
      }
      std::reverse(path.cells.begin(), path.cells.end());
      for (const GridIndex& c : path.cells) {
        path.waypoints.push_back(grid.cell_center(c));
      }
      path.exact_cost = g[i];
      path.total_cost = g[i].value();
      fill_crossed_objects(map, path);
      result.status = PlanStatus::Ok;
      return result;
    }
    for (int k = 0; k < 8; ++k) {
      const GridIndex nb{top.cell.col + kNeighbourDc[k], top.cell.row + kNeighbourDr[k]};
      if (!grid.in_bounds(nb)) {
        continue;
      }
      const std::size_t j = grid.flat(nb);
      if (closed[j] || map.composed(nb).fatal() || cuts_corner(map, top.cell, nb)) {
        continue;
      }
      const PathCost ng = g[i] + edge_cost(map, top.cell, nb, config.base_cost);
      if (!seen[j] || ng < g[j]) {
        seen[j] = true;
        g[j] = ng;
        parent[j] = i;
        const double h = heuristic(nb);
        open.push({ng.value() + h, h, nb, ng});
      }
    }
  }
  result.status = PlanStatus::NoPath;
  return result;
}

PathCost exact_path_cost(const LayeredCostmap& map, const std::vector<GridIndex>& cells,
                         int base_cost) {
  PathCost total;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int dc = std::abs(cells[i].col - cells[i - 1].col);
    const int dr = std::abs(cells[i].row - cells[i - 1].row);
    if (std::max(dc, dr) != 1) {
      throw BrokenChainError("waypoints " + std::to_string(i - 1) + " and " + std::to_string(i) +
                             " are not 8-neighbours");
    }
    if (!map.in_bounds(cells[i])) {
      throw OutOfBoundsError("path leaves the costmap");
    }
    total = total + edge_cost(map, cells[i - 1], cells[i], base_cost);
  }
  return total;
}

double path_cost(const LayeredCostmap& map, const PlannedPath& path, int base_cost) {
  std::vector<GridIndex> cells;
  cells.reserve(path.waypoints.size());
  for (const Vec2& w : path.waypoints) {
    cells.push_back(map.world_to_cell(w));
  }
  return exact_path_cost(map, cells, base_cost).value();
}

std::size_t nearest_waypoint(const PlannedPath& path, Vec2 p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const double d = (path.waypoints[i] - p).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

namespace {

GridIndex cell_of(const LayeredCostmap& map, const PlannedPath& path, std::size_t i) {
  if (path.cells.size() == path.waypoints.size()) {
    return path.cells[i];
  }
  return map.world_to_cell(path.waypoints[i]);
}

}  // namespace

std::optional<BlockingObject> first_blocking_object(const LayeredCostmap& map,
                                                    const PlannedPath& path,
                                                    const Pose2D& robot_pose) {
  if (path.empty()) {
    return std::nullopt;
  }
  for (std::size_t i = nearest_waypoint(path, robot_pose.position()); i < path.waypoints.size();
       ++i) {
    const CostCell& cell = map.composed(cell_of(map, path, i));
    if (cell.movable_cost() > 0 && cell.object_id) {
      return BlockingObject{*cell.object_id, i};
    }
  }
  return std::nullopt;
}

bool path_enters_footprint(const LayeredCostmap& map, const PlannedPath& path, int id,
                           std::size_t from) {
  for (std::size_t i = from; i < path.waypoints.size(); ++i) {
    const CostCell& cell = map.composed(cell_of(map, path, i));
    if (cell.source == CellSource::MovableObject && cell.object_id == id) {
      return true;
    }
  }
  return false;
}

std::optional<GridIndex> nearest_traversable_cell(const LayeredCostmap& map, GridIndex from,
                                                  int max_cells) {
  for (int r = 0; r <= max_cells; ++r) {
    for (int dr = -r; dr <= r; ++dr) {
      for (int dc = -r; dc <= r; ++dc) {
        if (std::max(std::abs(dc), std::abs(dr)) != r) {
          continue;
        }
        const GridIndex c{from.col + dc, from.row + dr};
        if (map.in_bounds(c) && !map.composed(c).fatal()) {
          return c;
        }
      }
    }
  }
  return std::nullopt;
}

void write_path_csv(const PlannedPath& path, std::ostream& out) {
  char buf[64];
  for (const Vec2& w : path.waypoints) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f\n", w.x, w.y);
    out << buf;
  }
}

}  // namespace namo
