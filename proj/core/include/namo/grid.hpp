#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "namo/geometry.hpp"

namespace namo {

/// Cell address. Ordering is row-major: by row, then by column.
struct GridIndex {
  int col{0};
  int row{0};

  constexpr bool operator==(const GridIndex&) const = default;
  constexpr std::strong_ordering operator<=>(const GridIndex& o) const {
    if (auto c = row <=> o.row; c != 0) {
      return c;
    }
    return col <=> o.col;
  }
};

/// Placement of a regular grid in the world frame. Cell (0, 0) covers
/// [origin, origin + resolution) on both axes.
struct GridGeometry {
  int width{0};
  int height{0};
  double resolution{0.05};
  Vec2 origin;

  bool in_bounds(GridIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height;
  }
  std::size_t flat(GridIndex c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.col);
  }
  GridIndex unflat(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width)),
            static_cast<int>(i / static_cast<std::size_t>(width))};
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  /// Floor indexing; may return indices outside the grid.
  GridIndex unchecked_cell(Vec2 world) const;
  std::optional<GridIndex> world_to_cell(Vec2 world) const;
  Vec2 cell_center(GridIndex c) const;
};

/// Cells whose centers lie inside the polygon, clipped to the grid, in
/// row-major order.
std::vector<GridIndex> rasterize_polygon(const GridGeometry& grid, std::span<const Vec2> poly);

}  // namespace namo
