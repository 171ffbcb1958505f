#include "namo/contacts.hpp"

#include <algorithm>

namespace namo {

namespace {

constexpr int kPasses = 4;
constexpr double kSlop = 1e-9;

bool overlaps_any(std::span<const Vec2> candidate, std::span<const Polygon> walls,
                  const std::vector<Polygon>& outlines, std::size_t self) {
  for (const Polygon& w : walls) {
    if (convex_polygons_overlap(candidate, w)) {
      return true;
    }
  }
  for (std::size_t i = 0; i < outlines.size(); ++i) {
    if (i != self && convex_polygons_overlap(candidate, outlines[i])) {
      return true;
    }
  }
  return false;
}

}  // namespace

double max_penetration(Vec2 center, double radius, std::span<const Polygon> outlines) {
  double worst = 0.0;
  for (const Polygon& p : outlines) {
    if (auto c = disc_polygon_contact(center, radius, p)) {
      worst = std::max(worst, c->penetration);
    }
  }
  return worst;
}

ContactResult resolve_contacts(const Pose2D& previous, const Pose2D& proposed, double radius,
                               std::span<const Polygon> walls,
                               std::span<const ContactBody> objects) {
  ContactResult result;
  Vec2 pos = proposed.position();
  std::vector<Polygon> outlines;
  std::vector<Vec2> moved(objects.size());
  std::vector<bool> blocked(objects.size(), false);
  outlines.reserve(objects.size());
  for (const ContactBody& b : objects) {
    outlines.push_back(b.outline);
  }

  for (int pass = 0; pass < kPasses; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto c = disc_polygon_contact(pos, radius, outlines[i]);
      if (!c || c->penetration <= kSlop) {
        continue;
      }
      if (objects[i].pushable && !blocked[i]) {
        const Vec2 delta = c->normal * -c->penetration;
        Polygon candidate = translate_polygon(outlines[i], delta);
        if (!overlaps_any(candidate, walls, outlines, i)) {
          outlines[i] = std::move(candidate);
          moved[i] += delta;
          changed = true;
          continue;
        }
        blocked[i] = true;
      }
      pos += c->normal * c->penetration;
      changed = true;
    }
    for (const Polygon& w : walls) {
      const auto c = disc_polygon_contact(pos, radius, w);
      if (c && c->penetration > kSlop) {
        pos += c->normal * c->penetration;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }

  double residual = max_penetration(pos, radius, walls);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (auto c = disc_polygon_contact(pos, radius, outlines[i])) {
      residual = std::max(residual, c->penetration);
    }
  }
  if (residual > 1e-7) {
    // Turning in place never adds overlap, so keep the heading.
    result.pose = Pose2D::make(previous.x, previous.y, proposed.theta);
    result.reverted = true;
    outlines.clear();
    for (const ContactBody& b : objects) {
      outlines.push_back(b.outline);
    }
    std::fill(moved.begin(), moved.end(), Vec2{});
    pos = previous.position();
  } else {
    result.pose = Pose2D::make(pos.x, pos.y, proposed.theta);
  }

  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (moved[i] != Vec2{}) {
      result.displacements[objects[i].id] = moved[i];
    }
    if (blocked[i]) {
      result.blocked.push_back(objects[i].id);
    }
    const auto c = disc_polygon_contact(pos, radius + 1e-6, outlines[i]);
    if (c) {
      result.contacts.push_back(objects[i].id);
    }
  }
  std::sort(result.contacts.begin(), result.contacts.end());
  std::sort(result.blocked.begin(), result.blocked.end());
  return result;
}

}  // namespace namo
