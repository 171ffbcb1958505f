#include "namo/costmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace namo {

const char* to_string(CellSource s) {
  switch (s) {
    case CellSource::Free:
      return "free";
    case CellSource::Static:
      return "static";
    case CellSource::MovableObject:
      return "movable_object";
    case CellSource::UnmovableObject:
      return "unmovable_object";
    case CellSource::Inflation:
      return "inflation";
  }
  return "?";
}

LayeredCostmap::LayeredCostmap(GridGeometry geometry, double inflation_radius)
    : geometry_(geometry),
      inflation_radius_(inflation_radius),
      static_layer_(geometry.cell_count(), false),
      object_layer_(geometry.cell_count()),
      composed_(geometry.cell_count()) {
  if (geometry.width <= 0 || geometry.height <= 0 || !(geometry.resolution > 0.0)) {
    throw std::invalid_argument("costmap needs positive size and resolution");
  }
  if (!(inflation_radius >= 0.0)) {
    throw std::invalid_argument("inflation radius must be >= 0");
  }
}

void LayeredCostmap::check_bounds(std::span<const GridIndex> cells) const {
  for (const GridIndex& c : cells) {
    if (!geometry_.in_bounds(c)) {
      throw OutOfBoundsError("cell (" + std::to_string(c.col) + ", " + std::to_string(c.row) +
                             ") is outside the costmap");
    }
  }
}

void LayeredCostmap::set_static(std::span<const GridIndex> cells) {
  check_bounds(cells);
  for (const GridIndex& c : cells) {
    static_layer_[geometry_.flat(c)] = true;
  }
}

void LayeredCostmap::upsert_object(int id, const ObjectClass& cls,
                                   std::span<const GridIndex> cells) {
  check_bounds(cells);
  std::vector<GridIndex> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  objects_.insert_or_assign(id, ObjectEntry{cls, std::move(sorted)});
  object_layer_ = build_object_layer();
}

void LayeredCostmap::mark_object_unmovable(int id) {
  if (!objects_.contains(id)) {
    throw UnknownObjectError("object " + std::to_string(id) + " is not in the costmap");
  }
  unmovable_override_.insert(id);
  object_layer_ = build_object_layer();
}

const std::vector<GridIndex>& LayeredCostmap::object_cells(int id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) {
    throw UnknownObjectError("object " + std::to_string(id) + " is not in the costmap");
  }
  return it->second.cells;
}

const ObjectClass& LayeredCostmap::object_class(int id) const {
  auto it = objects_.find(id);
  if (it == objects_.end()) {
    throw UnknownObjectError("object " + std::to_string(id) + " is not in the costmap");
  }
  return it->second.cls;
}

std::vector<int> LayeredCostmap::object_ids() const {
  std::vector<int> ids;
  ids.reserve(objects_.size());
  for (const auto& [id, entry] : objects_) {
    ids.push_back(id);
  }
  return ids;
}

std::vector<CostCell> LayeredCostmap::build_object_layer() const {
  std::vector<CostCell> layer(geometry_.cell_count());
  for (const auto& [id, entry] : objects_) {
    const bool fatal = !entry.cls.movable || unmovable_override_.contains(id);
    const CostCell candidate =
        fatal ? CostCell{kFatalCost, id, CellSource::UnmovableObject}
              : CostCell{entry.cls.move_cost, id, CellSource::MovableObject};
    for (const GridIndex& c : entry.cells) {
      CostCell& slot = layer[geometry_.flat(c)];
      // Ids arrive ascending, so a strict comparison keeps the lower id on ties.
      if (slot.source == CellSource::Free || candidate.cost > slot.cost) {
        slot = candidate;
      }
    }
  }
  return layer;
}

CostCell LayeredCostmap::static_cell(GridIndex c) const {
  if (static_layer_[geometry_.flat(c)]) {
    return {kFatalCost, std::nullopt, CellSource::Static};
  }
  return {};
}

CostCell LayeredCostmap::object_cell(GridIndex c) const { return object_layer_[geometry_.flat(c)]; }

CostCell LayeredCostmap::raw(GridIndex c) const {
  if (static_layer_[geometry_.flat(c)]) {
    return {kFatalCost, std::nullopt, CellSource::Static};
  }
  return object_layer_[geometry_.flat(c)];
}

void LayeredCostmap::inflate_and_compose() {
  const int w = geometry_.width;
  const int h = geometry_.height;
  const double r_cells = inflation_radius_ / geometry_.resolution;
  const double r2 = r_cells * r_cells + 1e-9;
  const int reach = static_cast<int>(std::floor(r_cells + 1e-9));

  struct Offset {
    int dc, dr, d2;
  };
  std::vector<Offset> offsets;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const int d2 = dc * dc + dr * dr;
      if (d2 <= r2) {
        offsets.push_back({dc, dr, d2});
      }
    }
  }

  struct Nearest {
    int d2{std::numeric_limits<int>::max()};
    int id{0};
    std::uint8_t cost{0};
  };
  const std::size_t n = geometry_.cell_count();
  std::vector<bool> fatal_spread(n, false);
  std::vector<Nearest> nearest(n);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const CostCell src = raw({c, r});
      if (src.source == CellSource::Free) {
        continue;
      }
      for (const Offset& o : offsets) {
        const GridIndex t{c + o.dc, r + o.dr};
        if (!geometry_.in_bounds(t)) {
          continue;
        }
        const std::size_t i = geometry_.flat(t);
        if (src.fatal()) {
          fatal_spread[i] = true;
        } else {
          Nearest& best = nearest[i];
          const int id = *src.object_id;
          if (o.d2 < best.d2 || (o.d2 == best.d2 && id < best.id)) {
            best = {o.d2, id, src.cost};
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const CostCell src = raw(geometry_.unflat(i));
    CostCell out;
    if (src.fatal()) {
      out = src;
    } else if (fatal_spread[i]) {
      out = {kFatalCost, std::nullopt, CellSource::Inflation};
    } else if (src.source == CellSource::MovableObject) {
      out = src;
    } else if (nearest[i].d2 != std::numeric_limits<int>::max()) {
      out = {nearest[i].cost, nearest[i].id, CellSource::Inflation};
    }
    composed_[i] = out;
  }
}

GridIndex LayeredCostmap::world_to_cell(Vec2 world) const {
  auto c = geometry_.world_to_cell(world);
  if (!c) {
    throw OutOfBoundsError("point (" + std::to_string(world.x) + ", " + std::to_string(world.y) +
                           ") is outside the costmap");
  }
  return *c;
}

std::pair<CostCell, GridIndex> LayeredCostmap::cell_at(Vec2 world) const {
  const GridIndex c = world_to_cell(world);
  return {composed(c), c};
}

void write_costmap_pgm(const LayeredCostmap& map, std::ostream& out) {
  out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  for (int r = map.height() - 1; r >= 0; --r) {
    for (int c = 0; c < map.width(); ++c) {
      out.put(static_cast<char>(255 - map.composed({c, r}).cost));
    }
  }
}

void write_object_table(const LayeredCostmap& map, std::ostream& out) {
  for (int id : map.object_ids()) {
    const auto& cells = map.object_cells(id);
    const ObjectClass& cls = map.object_class(id);
    const bool fatal = !cls.movable || map.is_marked_unmovable(id);
    out << id << ' ' << cls.name << ' ' << (fatal ? "fatal" : "movable") << ' ' << cells.size();
    for (const GridIndex& c : cells) {
      out << ' ' << c.col << ',' << c.row;
    }
    out << '\n';
  }
}

}  // namespace namo
