#pragma once

#include <map>
#include <span>
#include <vector>

#include "namo/geometry.hpp"

namespace namo {

/// An object as seen by contact resolution: its current world outline and
/// whether the robot may shove it.
struct ContactBody {
  int id{0};
  Polygon outline;
  bool pushable{false};
};

struct ContactResult {
  Pose2D pose;
  /// Translation applied to each pushed object, keyed by id.
  std::map<int, Vec2> displacements;
  /// Ids touched by the disc at the end of the step, ascending.
  std::vector<int> contacts;
  /// Pushable ids whose push was cancelled because they would overlap a
  /// wall or another object.
  std::vector<int> blocked;
  /// True when the step could not be made penetration-free and was undone.
  bool reverted{false};
};

/// Quasi-static contact step for a disc robot moving from `previous` to
/// `proposed`. Pushable objects the disc penetrates are translated out of
/// the disc along the contact normal; walls, non-pushable objects and
/// blocked pushes push the disc back instead. If penetration remains after
/// a few passes the robot stays at `previous` and nothing moves. All
/// outlines must be convex and counter-clockwise.
ContactResult resolve_contacts(const Pose2D& previous, const Pose2D& proposed, double radius,
                               std::span<const Polygon> walls,
                               std::span<const ContactBody> objects);

/// Largest overlap between the disc and any of the outlines (0 if none).
double max_penetration(Vec2 center, double radius, std::span<const Polygon> outlines);

}  // namespace namo
