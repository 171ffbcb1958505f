#include "namo/grid.hpp"

#include <algorithm>
#include <cmath>

namespace namo {

GridIndex GridGeometry::unchecked_cell(Vec2 world) const {
  return {static_cast<int>(std::floor((world.x - origin.x) / resolution)),
          static_cast<int>(std::floor((world.y - origin.y) / resolution))};
}

std::optional<GridIndex> GridGeometry::world_to_cell(Vec2 world) const {
  const double fx = std::floor((world.x - origin.x) / resolution);
  const double fy = std::floor((world.y - origin.y) / resolution);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width && fy < height)) {
    return std::nullopt;
  }
  return GridIndex{static_cast<int>(fx), static_cast<int>(fy)};
}

Vec2 GridGeometry::cell_center(GridIndex c) const {
  return {origin.x + (c.col + 0.5) * resolution, origin.y + (c.row + 0.5) * resolution};
}

std::vector<GridIndex> rasterize_polygon(const GridGeometry& grid, std::span<const Vec2> poly) {
  std::vector<GridIndex> cells;
  if (poly.size() < 3) {
    return cells;
  }
  double min_x = poly[0].x, max_x = poly[0].x, min_y = poly[0].y, max_y = poly[0].y;
  for (const Vec2& v : poly) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const GridIndex lo = grid.unchecked_cell({min_x, min_y});
  const GridIndex hi = grid.unchecked_cell({max_x, max_y});
  for (int r = std::max(lo.row, 0); r <= std::min(hi.row, grid.height - 1); ++r) {
    for (int c = std::max(lo.col, 0); c <= std::min(hi.col, grid.width - 1); ++c) {
      if (point_in_polygon(grid.cell_center({c, r}), poly)) {
        cells.push_back({c, r});
      }
    }
  }
  return cells;
}

}  // namespace namo
