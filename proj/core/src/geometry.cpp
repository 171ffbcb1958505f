#include "namo/geometry.hpp"

#include <algorithm>
#include <limits>

namespace namo {

double normalize_angle(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Pose2D compose(const Pose2D& parent, const Pose2D& child) {
  const Vec2 t = rotate({child.x, child.y}, parent.theta);
  return Pose2D::make(parent.x + t.x, parent.y + t.y, parent.theta + child.theta);
}

Pose2D inverse(const Pose2D& pose) {
  const Vec2 t = rotate({-pose.x, -pose.y}, -pose.theta);
  return Pose2D::make(t.x, t.y, -pose.theta);
}

Vec2 transform_point(const Pose2D& pose, Vec2 local) {
  return rotate(local, pose.theta) + Vec2{pose.x, pose.y};
}

double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += poly[i].cross(poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

bool is_convex_ccw(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3 || signed_area(poly) <= 0.0) {
    return false;
  }
  double winding = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const Vec2 c = poly[(i + 2) % n];
    const Vec2 e0 = b - a;
    const Vec2 e1 = c - b;
    if (e0.norm() == 0.0) {
      return false;
    }
    if (e0.cross(e1) < -1e-12) {
      return false;
    }
    winding += std::atan2(e0.cross(e1), e0.dot(e1));
  }
  // A star-shaped self-intersecting outline turns more than once.
  return std::abs(winding - 2.0 * kPi) < 1e-6;
}

Polygon transform_polygon(const Pose2D& pose, std::span<const Vec2> poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& v : poly) {
    out.push_back(transform_point(pose, v));
  }
  return out;
}

Polygon translate_polygon(std::span<const Vec2> poly, Vec2 delta) {
  Polygon out(poly.begin(), poly.end());
  for (Vec2& v : out) {
    v += delta;
  }
  return out;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) {
    return a;
  }
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

namespace {

struct EdgeQuery {
  double distance{std::numeric_limits<double>::infinity()};
  Vec2 closest;
  std::size_t edge{0};
};

EdgeQuery nearest_edge(Vec2 p, std::span<const Vec2> poly) {
  EdgeQuery best;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = closest_point_on_segment(p, poly[i], poly[(i + 1) % n]);
    const double d = (p - c).norm();
    if (d < best.distance) {
      best = {d, c, i};
    }
  }
  return best;
}

}  // namespace

double distance_to_polygon(Vec2 p, std::span<const Vec2> poly) {
  if (point_in_polygon(p, poly)) {
    return 0.0;
  }
  return nearest_edge(p, poly).distance;
}

std::optional<DiscContact> disc_polygon_contact(Vec2 center, double radius,
                                                std::span<const Vec2> convex) {
  const EdgeQuery q = nearest_edge(center, convex);
  if (q.distance < 1e-12 || point_in_polygon(center, convex)) {
    const Vec2 a = convex[q.edge];
    const Vec2 b = convex[(q.edge + 1) % convex.size()];
    const Vec2 e = b - a;
    // Outward normal of a CCW edge.
    Vec2 n{e.y, -e.x};
    n = n * (1.0 / n.norm());
    return DiscContact{radius + q.distance, n};
  }
  if (q.distance >= radius) {
    return std::nullopt;
  }
  Vec2 n = center - q.closest;
  n = n * (1.0 / q.distance);
  return DiscContact{radius - q.distance, n};
}

namespace {

void project(std::span<const Vec2> poly, Vec2 axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const Vec2& v : poly) {
    const double p = v.dot(axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
}

bool separated_along_edges(std::span<const Vec2> a, std::span<const Vec2> b, double tolerance) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = a[(i + 1) % n] - a[i];
    const double len = e.norm();
    if (len == 0.0) {
      continue;
    }
    const Vec2 axis{e.y / len, -e.x / len};
    double a_lo, a_hi, b_lo, b_hi;
    project(a, axis, a_lo, a_hi);
    project(b, axis, b_lo, b_hi);
    const double overlap = std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
    if (overlap <= tolerance) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool convex_polygons_overlap(std::span<const Vec2> a, std::span<const Vec2> b, double tolerance) {
  return !separated_along_edges(a, b, tolerance) && !separated_along_edges(b, a, tolerance);
}

BoundingCircle bounding_circle(std::span<const Vec2> poly) {
  Vec2 c;
  for (const Vec2& v : poly) {
    c += v;
  }
  c = c * (1.0 / static_cast<double>(poly.size()));
  double r = 0.0;
  for (const Vec2& v : poly) {
    r = std::max(r, (v - c).norm());
  }
  return {c, r};
}

Polygon make_rectangle(double min_x, double min_y, double max_x, double max_y) {
  return {{min_x, min_y}, {max_x, min_y}, {max_x, max_y}, {min_x, max_y}};
}

Polygon make_regular_polygon(int sides, double circumradius) {
  Polygon out;
  out.reserve(static_cast<std::size_t>(sides));
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * kPi * i / sides;
    out.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
  }
  return out;
}

}  // namespace namo
