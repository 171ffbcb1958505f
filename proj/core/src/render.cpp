#include "namo/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace namo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ray {
  double ox, oy, oz;
  double dx, dy, dz;
};

/// Parameter interval where the ray's floor projection lies inside the
/// convex outline (Cyrus-Beck clip). Empty when lo > hi.
void clip_2d(const Ray& ray, const Polygon& poly, double& lo, double& hi) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n && lo <= hi; ++i) {
    const Vec2 a = poly[i];
    const Vec2 e = poly[(i + 1) % n] - a;
    const Vec2 normal{e.y, -e.x};
    const double num = normal.x * (ray.ox - a.x) + normal.y * (ray.oy - a.y);
    const double den = normal.x * ray.dx + normal.y * ray.dy;
    if (den == 0.0) {
      if (num > 0.0) {
        lo = kInf;
      }
      continue;
    }
    const double t = -num / den;
    if (den < 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
  }
}

double hit_prism(const Ray& ray, const Prism& prism) {
  double lo = 0.0;
  double hi = kInf;
  if (ray.dz < 0.0) {
    lo = std::max(lo, (prism.height - ray.oz) / ray.dz);
    hi = std::min(hi, -ray.oz / ray.dz);
  } else if (ray.dz > 0.0) {
    lo = std::max(lo, -ray.oz / ray.dz);
    hi = std::min(hi, (prism.height - ray.oz) / ray.dz);
  } else if (ray.oz < 0.0 || ray.oz > prism.height) {
    return kInf;
  }
  if (lo > hi) {
    return kInf;
  }
  clip_2d(ray, prism.outline, lo, hi);
  return lo <= hi ? lo : kInf;
}

}  // namespace

RenderedView render_view(const RenderScene& scene, const CameraIntrinsics& intr,
                         const CameraExtrinsics& extr, const Pose2D& robot_pose) {
  validate(intr);
  RenderedView view{DepthImage(intr.width, intr.height), SegmentationMask(intr.width, intr.height)};
  const Pose2D cam = compose(robot_pose, extr.pose_in_robot);
  const double ct = std::cos(extr.tilt);
  const double st = std::sin(extr.tilt);
  const double cy = std::cos(cam.theta);
  const double sy = std::sin(cam.theta);

  std::vector<BoundingCircle> bounds;
  bounds.reserve(scene.prisms.size());
  for (const Prism& p : scene.prisms) {
    bounds.push_back(bounding_circle(p.outline));
  }

  for (int v = 0; v < intr.height; ++v) {
    const double yc = (v - intr.cy) / intr.fy;
    for (int u = 0; u < intr.width; ++u) {
      const double xc = (u - intr.cx) / intr.fx;
      // Optical (xc, yc, 1) expressed in the robot frame, then yawed.
      const double fwd = -st * yc + ct;
      const double left = -xc;
      const Ray ray{cam.x, cam.y, extr.mount_height, cy * fwd - sy * left, sy * fwd + cy * left,
                    -ct * yc - st};
      const double dxy = std::hypot(ray.dx, ray.dy);

      double best = kInf;
      int label = 0;
      if (ray.dz < 0.0) {
        best = -ray.oz / ray.dz;
      }
      for (std::size_t i = 0; i < scene.prisms.size(); ++i) {
        // Skip prisms whose bounding circle misses the ray's floor track.
        const double rx = bounds[i].center.x - ray.ox;
        const double ry = bounds[i].center.y - ray.oy;
        if (dxy > 0.0) {
          const double along = (rx * ray.dx + ry * ray.dy) / dxy;
          const double across = std::abs(rx * ray.dy - ry * ray.dx) / dxy;
          if (across > bounds[i].radius || along < -bounds[i].radius) {
            continue;
          }
        }
        const double t = hit_prism(ray, scene.prisms[i]);
        if (t < best) {
          best = t;
          label = scene.prisms[i].label;
        }
      }
      if (best < scene.max_depth) {
        view.depth.at(u, v) = best;
        view.mask.at(u, v) = label;
      }
    }
  }
  return view;
}

}  // namespace namo
