#include "namo/world.hpp"

#include <algorithm>
#include <stdexcept>

namespace namo {

const std::vector<std::string>& known_class_names() {
  static const std::vector<std::string> names{
      std::string(kBoxCardboard), std::string(kTrashCan), std::string(kFoodTrolley),
      std::string(kVaseGlass), std::string(kUnknownClass)};
  return names;
}

void validate(const ObjectClass& cls) {
  const auto& names = known_class_names();
  if (std::find(names.begin(), names.end(), cls.name) == names.end()) {
    throw std::invalid_argument("unknown object class '" + cls.name + "'");
  }
  if ((cls.name == kVaseGlass || cls.name == kUnknownClass) && cls.movable) {
    throw std::invalid_argument("class '" + cls.name + "' cannot be movable");
  }
  if (cls.movable && (cls.move_cost == 0 || cls.move_cost == kFatalCost)) {
    throw std::invalid_argument("movable class '" + cls.name + "' needs move_cost in [1, 254]");
  }
  if (!cls.movable && cls.move_cost != kFatalCost) {
    throw std::invalid_argument("unmovable class '" + cls.name + "' must carry the fatal cost");
  }
}

ClassTable ClassTable::defaults() {
  ClassTable t;
  t.set({std::string(kBoxCardboard), true, 10});
  t.set({std::string(kTrashCan), true, 25});
  t.set({std::string(kFoodTrolley), true, 40});
  t.set({std::string(kVaseGlass), false, kFatalCost});
  t.set({std::string(kUnknownClass), false, kFatalCost});
  return t;
}

const ObjectClass& ClassTable::at(std::string_view name) const {
  auto it = classes_.find(name);
  if (it == classes_.end()) {
    throw std::out_of_range("no class named '" + std::string(name) + "'");
  }
  return it->second;
}

bool ClassTable::contains(std::string_view name) const { return classes_.contains(name); }

void ClassTable::set(ObjectClass cls) {
  validate(cls);
  std::string key = cls.name;
  classes_.insert_or_assign(std::move(key), std::move(cls));
}

void validate(const ObjectInstance& obj) {
  if (obj.footprint.size() < 3) {
    throw std::invalid_argument("footprint needs at least 3 vertices");
  }
  if (!is_convex_ccw(obj.footprint)) {
    throw std::invalid_argument("footprint must be convex and counter-clockwise");
  }
  if (!(obj.mass > 0.0)) {
    throw std::invalid_argument("mass must be > 0");
  }
  if (!(obj.friction_mu > 0.0 && obj.friction_mu <= 2.0)) {
    throw std::invalid_argument("friction must lie in (0, 2]");
  }
  validate(obj.cls);
}

Polygon footprint_world(const ObjectInstance& obj) {
  return transform_polygon(obj.pose, obj.footprint);
}

void validate(const RobotParams& p) {
  if (!(p.radius > 0.0)) {
    throw std::invalid_argument("radius must be > 0");
  }
  if (!(p.cruise_speed > 0.0) || !(p.push_speed > 0.0)) {
    throw std::invalid_argument("speeds must be > 0");
  }
  if (p.push_speed > p.cruise_speed) {
    throw std::invalid_argument("push_speed must not exceed cruise_speed");
  }
  if (!(p.max_angular > 0.0)) {
    throw std::invalid_argument("max_angular must be > 0");
  }
  if (!(p.wheel_base > 0.0)) {
    throw std::invalid_argument("wheel_base must be > 0");
  }
  if (p.current_idle < 0.0 || p.current_per_newton < 0.0) {
    throw std::invalid_argument("current model coefficients must be >= 0");
  }
  if (!(p.current_limit > p.current_idle)) {
    throw std::invalid_argument("current_limit must exceed current_idle");
  }
}

}  // namespace namo
