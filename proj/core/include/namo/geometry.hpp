#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace namo {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Planar rigid-body pose. theta is kept in (-pi, pi] by every operation
/// that produces a Pose2D.
struct Pose2D {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  static Pose2D make(double x, double y, double theta) { return {x, y, normalize_angle(theta)}; }
  Vec2 position() const { return {x, y}; }
};

Pose2D compose(const Pose2D& parent, const Pose2D& child);
Pose2D inverse(const Pose2D& pose);

Vec2 rotate(Vec2 v, double angle);
Vec2 transform_point(const Pose2D& pose, Vec2 local);

using Polygon = std::vector<Vec2>;

/// Positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> poly);

/// True for a strictly convex, counter-clockwise polygon with at least
/// three vertices. Collinear vertices are tolerated.
bool is_convex_ccw(std::span<const Vec2> poly);

Polygon transform_polygon(const Pose2D& pose, std::span<const Vec2> poly);
Polygon translate_polygon(std::span<const Vec2> poly, Vec2 delta);

/// Crossing-number test; works for any simple polygon.
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);

/// Unsigned distance from p to the polygon region (0 when inside).
double distance_to_polygon(Vec2 p, std::span<const Vec2> poly);

struct DiscContact {
  double penetration{0.0};
  /// Unit vector pointing from the polygon towards the disc center.
  Vec2 normal;
};

/// Overlap between a disc and a convex CCW polygon. Returns nullopt when
/// the disc does not touch the polygon (penetration <= 0).
std::optional<DiscContact> disc_polygon_contact(Vec2 center, double radius,
                                                std::span<const Vec2> convex);

/// Separating-axis test for convex polygons. Contact with overlap depth
/// below `tolerance` does not count.
bool convex_polygons_overlap(std::span<const Vec2> a, std::span<const Vec2> b,
                             double tolerance = 1e-9);

struct BoundingCircle {
  Vec2 center;
  double radius{0.0};
};

BoundingCircle bounding_circle(std::span<const Vec2> poly);

/// Axis-aligned rectangle as a CCW polygon.
Polygon make_rectangle(double min_x, double min_y, double max_x, double max_y);

/// Regular n-gon centered at the origin, CCW.
Polygon make_regular_polygon(int sides, double circumradius);

}  // namespace namo
