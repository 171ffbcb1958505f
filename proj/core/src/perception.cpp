#include "namo/perception.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace namo {

void validate(const CameraIntrinsics& intr) {
  if (!(intr.fx > 0.0) || !(intr.fy > 0.0)) {
    throw std::invalid_argument("focal lengths must be > 0");
  }
  if (intr.width <= 0 || intr.height <= 0) {
    throw std::invalid_argument("image size must be positive");
  }
  if (!(intr.cx >= 0.0 && intr.cx < intr.width && intr.cy >= 0.0 && intr.cy < intr.height)) {
    throw std::invalid_argument("principal point must lie inside the image");
  }
}

PointCloud depth_to_cloud(const DepthImage& depth, const SegmentationMask& mask,
                          const CameraIntrinsics& intr) {
  if (depth.width != intr.width || depth.height != intr.height || mask.width != intr.width ||
      mask.height != intr.height ||
      depth.depth.size() != static_cast<std::size_t>(intr.width) * intr.height ||
      mask.labels.size() != depth.depth.size()) {
    throw std::invalid_argument("depth image, mask and intrinsics dimensions differ");
  }
  PointCloud cloud;
  cloud.frame = Frame::Camera;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      const int label = mask.at(u, v);
      if (!(z > 0.0) || label == 0) {
        continue;
      }
      cloud.push_back({(u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z}, label);
    }
  }
  return cloud;
}

// Columns of the camera-to-robot rotation: where the optical x (right),
// y (down) and z (forward) axes point in the robot frame before yaw.
Point3 camera_to_robot(const Point3& p, const CameraExtrinsics& extr) {
  const double s = std::sin(extr.tilt);
  const double c = std::cos(extr.tilt);
  const double fwd = -s * p.y + c * p.z;
  const double left = -p.x;
  const double up = -c * p.y - s * p.z;
  const Vec2 planar = transform_point(extr.pose_in_robot, {fwd, left});
  return {planar.x, planar.y, extr.mount_height + up};
}

Point3 robot_to_camera(const Point3& p, const CameraExtrinsics& extr) {
  const Vec2 local = transform_point(inverse(extr.pose_in_robot), {p.x, p.y});
  const double s = std::sin(extr.tilt);
  const double c = std::cos(extr.tilt);
  const double fwd = local.x;
  const double left = local.y;
  const double up = p.z - extr.mount_height;
  return {-left, -s * fwd - c * up, c * fwd - s * up};
}

PointCloud cloud_to_robot_frame(const PointCloud& cloud, const CameraExtrinsics& extr) {
  PointCloud out;
  out.frame = Frame::Robot;
  out.labels = cloud.labels;
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) {
    out.points.push_back(camera_to_robot(p, extr));
  }
  return out;
}

PointCloud cloud_to_world_frame(const PointCloud& cloud, const Pose2D& robot_pose) {
  PointCloud out;
  out.frame = Frame::World;
  out.labels = cloud.labels;
  out.points.reserve(cloud.size());
  for (const Point3& p : cloud.points) {
    const Vec2 w = transform_point(robot_pose, {p.x, p.y});
    out.points.push_back({w.x, w.y, p.z});
  }
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("voxel size must be > 0");
  }
  using Key = std::tuple<int, long, long, long>;
  struct Accum {
    double x{0.0}, y{0.0}, z{0.0};
    int n{0};
  };
  std::map<Key, Accum> voxels;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    const Key key{cloud.labels[i], static_cast<long>(std::floor(p.x / voxel_size)),
                  static_cast<long>(std::floor(p.y / voxel_size)),
                  static_cast<long>(std::floor(p.z / voxel_size))};
    Accum& a = voxels[key];
    a.x += p.x;
    a.y += p.y;
    a.z += p.z;
    ++a.n;
  }
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(voxels.size());
  out.labels.reserve(voxels.size());
  for (const auto& [key, a] : voxels) {
    out.push_back({a.x / a.n, a.y / a.n, a.z / a.n}, std::get<0>(key));
  }
  return out;
}

namespace {

struct CellKey {
  long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

double dist(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

std::vector<double> mean_knn_distances(const std::vector<Point3>& points, int k) {
  const std::size_t n = points.size();
  std::vector<double> result(n, 0.0);
  if (n == 0 || k <= 0) {
    return result;
  }
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
  if (kk == 0) {
    return result;
  }

  Point3 lo = points[0], hi = points[0];
  for (const Point3& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  const double per_axis = std::max(1.0, std::floor(std::cbrt(static_cast<double>(n))));
  const double h = extent > 0.0 ? extent / per_axis : 1.0;

  auto key_of = [&](const Point3& p) {
    return CellKey{static_cast<long>(std::floor((p.x - lo.x) / h)),
                   static_cast<long>(std::floor((p.y - lo.y) / h)),
                   static_cast<long>(std::floor((p.z - lo.z) / h))};
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> buckets;
  for (std::size_t i = 0; i < n; ++i) {
    buckets[key_of(points[i])].push_back(i);
  }
  const long max_ring = static_cast<long>(per_axis) + 1;

  std::vector<double> best;  // max-heap of the kk smallest distances
  best.reserve(kk + 1);
  for (std::size_t i = 0; i < n; ++i) {
    best.clear();
    const CellKey home = key_of(points[i]);
    for (long r = 0; r <= max_ring; ++r) {
      for (long dx = -r; dx <= r; ++dx) {
        for (long dy = -r; dy <= r; ++dy) {
          for (long dz = -r; dz <= r; ++dz) {
            if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != r) {
              continue;
            }
            auto it = buckets.find({home.x + dx, home.y + dy, home.z + dz});
            if (it == buckets.end()) {
              continue;
            }
            for (std::size_t j : it->second) {
              if (j == i) {
                continue;
              }
              const double d = dist(points[i], points[j]);
              if (best.size() < kk) {
                best.push_back(d);
                std::push_heap(best.begin(), best.end());
              } else if (d < best.front()) {
                std::pop_heap(best.begin(), best.end());
                best.back() = d;
                std::push_heap(best.begin(), best.end());
              }
            }
          }
        }
      }
      // Anything outside ring r is at least r * h away.
      if (best.size() == kk && best.front() <= static_cast<double>(r) * h) {
        break;
      }
    }
    std::sort(best.begin(), best.end());
    double sum = 0.0;
    for (double d : best) {
      sum += d;
    }
    result[i] = sum / static_cast<double>(kk);
  }
  return result;
}

PointCloud sor_filter(const PointCloud& cloud, int k, double alpha) {
  if (k < 1) {
    throw std::invalid_argument("sor_filter: k must be >= 1");
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("sor_filter: alpha must be >= 0");
  }
  if (cloud.size() <= static_cast<std::size_t>(k)) {
    return cloud;
  }
  const std::vector<double> d = mean_knn_distances(cloud.points, k);
  const double n = static_cast<double>(d.size());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double var = 0.0;
  for (double di : d) {
    var += (di - mean) * (di - mean);
  }
  const double stddev = std::sqrt(var / n);
  // Relative slack so that a cloud of equal distances is kept whole.
  const double threshold = mean + alpha * stddev + 1e-12 * std::max(1.0, mean);

  PointCloud out;
  out.frame = cloud.frame;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (d[i] <= threshold) {
      out.push_back(cloud.points[i], cloud.labels[i]);
    }
  }
  return out;
}

std::map<GridIndex, int> cloud_to_cells(const PointCloud& cloud, const CellProjection& proj) {
  if (!(proj.resolution > 0.0)) {
    throw std::invalid_argument("cloud_to_cells: resolution must be > 0");
  }
  std::map<GridIndex, std::map<int, int>> hits;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (p.z < proj.z_min || p.z > proj.z_max) {
      continue;
    }
    const double fx = std::floor((p.x - proj.origin.x) / proj.resolution);
    const double fy = std::floor((p.y - proj.origin.y) / proj.resolution);
    if (fx < 0.0 || fy < 0.0) {
      continue;
    }
    if (proj.extent && (fx >= proj.extent->col || fy >= proj.extent->row)) {
      continue;
    }
    ++hits[{static_cast<int>(fx), static_cast<int>(fy)}][cloud.labels[i]];
  }
  std::map<GridIndex, int> cells;
  for (const auto& [cell, per_label] : hits) {
    int best_label = 0;
    int best_count = 0;
    // per_label iterates ids ascending, so strict > keeps the smaller id on ties.
    for (const auto& [label, count] : per_label) {
      if (count >= proj.min_hits && count > best_count) {
        best_label = label;
        best_count = count;
      }
    }
    if (best_count > 0) {
      cells.emplace(cell, best_label);
    }
  }
  return cells;
}

std::map<GridIndex, int> perceive_cells(const DepthImage& depth, const SegmentationMask& mask,
                                        const CameraIntrinsics& intr,
                                        const CameraExtrinsics& extr, const Pose2D& robot_pose,
                                        const GridGeometry& grid, const PerceptionParams& params) {
  PointCloud cloud = depth_to_cloud(depth, mask, intr);
  // A return lies on a surface and the object is behind it. Pushing each
  // point a hair further along its ray settles surfaces that sit exactly on
  // a cell edge into the object's side instead of leaving it to rounding.
  constexpr double kBehindSurface = 1.0 + 1e-9;
  for (Point3& p : cloud.points) {
    p = {p.x * kBehindSurface, p.y * kBehindSurface, p.z * kBehindSurface};
  }
  cloud = cloud_to_world_frame(cloud_to_robot_frame(cloud, extr), robot_pose);
  if (params.voxel_size > 0.0) {
    cloud = voxel_downsample(cloud, params.voxel_size);
  }
  cloud = sor_filter(cloud, params.sor_k, params.sor_alpha);
  CellProjection proj;
  proj.resolution = grid.resolution;
  proj.origin = grid.origin;
  proj.z_min = params.z_min;
  proj.z_max = params.z_max;
  proj.min_hits = params.min_hits;
  proj.extent = GridIndex{grid.width, grid.height};
  return cloud_to_cells(cloud, proj);
}

bool floor_visible(const DepthImage& depth, const SegmentationMask& mask,
                   const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                   const Pose2D& robot_pose, Vec2 world_xy) {
  const Vec2 local = transform_point(inverse(robot_pose), world_xy);
  const Point3 c = robot_to_camera({local.x, local.y, 0.0}, extr);
  if (!(c.z > 1e-6)) {
    return false;
  }
  const int u = static_cast<int>(std::lround(intr.fx * c.x / c.z + intr.cx));
  const int v = static_cast<int>(std::lround(intr.fy * c.y / c.z + intr.cy));
  if (u < 0 || v < 0 || u >= depth.width || v >= depth.height) {
    return false;
  }
  const double z = depth.at(u, v);
  if (!(z > 0.0) || mask.at(u, v) != 0) {
    return false;
  }
  // Rounding to the pixel grid moves the floor hit by up to half a pixel.
  const double slack = 0.02 + 2.0 * c.z * c.z / intr.fy;
  return std::abs(z - c.z) <= slack;
}

}  // namespace namo
