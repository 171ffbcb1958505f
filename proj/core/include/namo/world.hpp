#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "namo/geometry.hpp"

namespace namo {

/// Cost sentinel for cells the robot may never occupy.
inline constexpr std::uint8_t kFatalCost = 255;

inline constexpr std::string_view kBoxCardboard = "box_cardboard";
inline constexpr std::string_view kTrashCan = "trash_can";
inline constexpr std::string_view kFoodTrolley = "food_trolley";
inline constexpr std::string_view kVaseGlass = "vase_glass";
inline constexpr std::string_view kUnknownClass = "unknown";

/// Semantic obstacle class. move_cost is the per-cell surcharge the planner
/// pays for driving through an object of this class; it approximates the
/// time needed to shove the object out of the way.
struct ObjectClass {
  std::string name;
  bool movable{false};
  std::uint8_t move_cost{kFatalCost};

  bool operator==(const ObjectClass&) const = default;
};

/// Names accepted as object classes, in canonical order.
const std::vector<std::string>& known_class_names();

/// Throws std::invalid_argument when the class violates its invariants
/// (unknown name, movable class with a fatal or zero cost, unmovable class
/// with a non-fatal cost, or vase_glass/unknown marked movable).
void validate(const ObjectClass& cls);

class ClassTable {
 public:
  /// box_cardboard=10, trash_can=25, food_trolley=40, vase_glass and
  /// unknown fatal.
  static ClassTable defaults();

  const ObjectClass& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  void set(ObjectClass cls);
  const std::map<std::string, ObjectClass, std::less<>>& entries() const { return classes_; }

 private:
  std::map<std::string, ObjectClass, std::less<>> classes_;
};

struct ObjectInstance {
  int id{0};
  ObjectClass cls;
  /// Convex CCW outline in the object frame, meters.
  Polygon footprint;
  Pose2D pose;
  double mass{1.0};
  double friction_mu{0.5};
};

/// Throws std::invalid_argument on a bad footprint, mass or friction.
void validate(const ObjectInstance& obj);

Polygon footprint_world(const ObjectInstance& obj);

struct RobotParams {
  double radius{0.2};
  double cruise_speed{0.4};
  double push_speed{0.15};
  double max_angular{1.5};
  double wheel_base{0.3};
  double current_idle{0.5};
  double current_per_newton{0.5};
  double current_limit{5.0};
};

void validate(const RobotParams& params);

}  // namespace namo
