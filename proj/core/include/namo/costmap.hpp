#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "namo/grid.hpp"
#include "namo/world.hpp"

namespace namo {

enum class CellSource : std::uint8_t { Free, Static, MovableObject, UnmovableObject, Inflation };

const char* to_string(CellSource s);

struct CostCell {
  std::uint8_t cost{0};
  std::optional<int> object_id;
  CellSource source{CellSource::Free};

  bool fatal() const { return cost == kFatalCost; }
  /// Surcharge the planner pays for entering this cell: the carried object
  /// cost for movable footprint and movable inflation cells, 0 otherwise.
  std::uint8_t movable_cost() const {
    if (cost == kFatalCost) {
      return 0;
    }
    return (source == CellSource::MovableObject || source == CellSource::Inflation) ? cost : 0;
  }
  bool operator==(const CostCell&) const = default;
};

class OutOfBoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class UnknownObjectError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Static/fatal layer, movable-object layer and a uniform inflation layer,
/// composed into one cost grid with object-id back-references.
///
/// Mutations only touch the raw layers; the composed grid reflects the raw
/// layers as of the last inflate_and_compose() call. Composition is a pure
/// function of the raw layers, so the order of set_static/upsert_object
/// calls never matters.
class LayeredCostmap {
 public:
  LayeredCostmap(GridGeometry geometry, double inflation_radius);

  const GridGeometry& geometry() const { return geometry_; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }
  double resolution() const { return geometry_.resolution; }
  Vec2 origin() const { return geometry_.origin; }
  double inflation_radius() const { return inflation_radius_; }
  bool in_bounds(GridIndex c) const { return geometry_.in_bounds(c); }

  /// Marks cells as static fatal obstacles. Throws OutOfBoundsError (and
  /// changes nothing) if any cell is outside the grid.
  void set_static(std::span<const GridIndex> cells);

  /// Replaces the cell set of object `id`. Unmovable classes and objects
  /// previously passed to mark_object_unmovable become fatal.
  void upsert_object(int id, const ObjectClass& cls, std::span<const GridIndex> cells);

  /// Forces object `id` fatal, now and for every later upsert. Throws
  /// UnknownObjectError if the id was never upserted.
  void mark_object_unmovable(int id);

  bool has_object(int id) const { return objects_.contains(id); }
  bool is_marked_unmovable(int id) const { return unmovable_override_.contains(id); }
  const std::vector<GridIndex>& object_cells(int id) const;
  const ObjectClass& object_class(int id) const;
  std::vector<int> object_ids() const;

  void inflate_and_compose();

  /// Pre-inflation view: max over the static and object layers.
  CostCell raw(GridIndex c) const;
  CostCell static_cell(GridIndex c) const;
  CostCell object_cell(GridIndex c) const;

  const CostCell& composed(GridIndex c) const { return composed_[geometry_.flat(c)]; }
  const std::vector<CostCell>& composed_cells() const { return composed_; }

  /// Composed cell under a world point. Throws OutOfBoundsError.
  std::pair<CostCell, GridIndex> cell_at(Vec2 world) const;
  GridIndex world_to_cell(Vec2 world) const;
  Vec2 cell_center(GridIndex c) const { return geometry_.cell_center(c); }

 private:
  struct ObjectEntry {
    ObjectClass cls;
    std::vector<GridIndex> cells;
  };

  void check_bounds(std::span<const GridIndex> cells) const;
  std::vector<CostCell> build_object_layer() const;

  GridGeometry geometry_;
  double inflation_radius_;
  std::vector<bool> static_layer_;
  std::map<int, ObjectEntry> objects_;
  std::set<int> unmovable_override_;
  std::vector<CostCell> object_layer_;
  std::vector<CostCell> composed_;
};

/// Binary 8-bit PGM of the composed layer, north up: image row 0 is grid row
/// height-1 and pixel value is 255 - cost (free white, fatal black).
void write_costmap_pgm(const LayeredCostmap& map, std::ostream& out);

/// One line per object: "<id> <class> <movable|fatal> <n> c,r c,r ...", ids
/// ascending and cells in row-major order.
void write_object_table(const LayeredCostmap& map, std::ostream& out);

}  // namespace namo
