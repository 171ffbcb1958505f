#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "namo/geometry.hpp"
#include "namo/grid.hpp"

namespace namo {

/// Pinhole intrinsics. Pixel (u, v) addresses column u, row v.
struct CameraIntrinsics {
  double fx{224.0};
  double fy{224.0};
  double cx{120.0};
  double cy{212.0};
  int width{240};
  int height{424};
};

void validate(const CameraIntrinsics& intr);

/// Camera mounting on the robot. Optical frame: x right, y down, z along
/// the optical axis. Robot frame: x forward, y left, z up from the floor.
/// tilt pitches the optical axis downwards.
struct CameraExtrinsics {
  double mount_height{0.9};
  double tilt{kPi / 6.0};
  /// Floor projection of the optical center, in the robot frame.
  Pose2D pose_in_robot;
};

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  bool operator==(const Point3&) const = default;
};

enum class Frame { Camera, Robot, World };

struct PointCloud {
  Frame frame{Frame::Camera};
  std::vector<Point3> points;
  /// Object id per point, parallel to points.
  std::vector<int> labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void push_back(Point3 p, int label) {
    points.push_back(p);
    labels.push_back(label);
  }
};

struct DepthImage {
  int width{0};
  int height{0};
  /// Row-major depth along the optical axis in meters; 0 marks no return.
  std::vector<double> depth;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0) {}
  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
};

struct SegmentationMask {
  int width{0};
  int height{0};
  /// Row-major object ids; 0 is background.
  std::vector<std::int32_t> labels;

  SegmentationMask() = default;
  SegmentationMask(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * h, 0) {}
  std::int32_t at(int u, int v) const { return labels[static_cast<std::size_t>(v) * width + u]; }
  std::int32_t& at(int u, int v) { return labels[static_cast<std::size_t>(v) * width + u]; }
};

/// Back-projects every labeled pixel with a valid depth. Throws
/// std::invalid_argument when image, mask and intrinsics disagree on size.
PointCloud depth_to_cloud(const DepthImage& depth, const SegmentationMask& mask,
                          const CameraIntrinsics& intr);

Point3 camera_to_robot(const Point3& p, const CameraExtrinsics& extr);
Point3 robot_to_camera(const Point3& p, const CameraExtrinsics& extr);

PointCloud cloud_to_robot_frame(const PointCloud& cloud, const CameraExtrinsics& extr);
PointCloud cloud_to_world_frame(const PointCloud& cloud, const Pose2D& robot_pose);

/// Replaces all points of one label inside a cubic voxel by their centroid.
/// Output order is by (label, voxel) so the result is independent of the
/// input order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

/// Mean distance from each point to its k nearest neighbours. Exact; uses a
/// uniform hash grid to avoid the quadratic scan.
std::vector<double> mean_knn_distances(const std::vector<Point3>& points, int k);

/// Statistical outlier removal: keeps points whose mean k-NN distance is at
/// most mean + alpha * stddev over the cloud. Clouds with <= k points are
/// returned unchanged.
PointCloud sor_filter(const PointCloud& cloud, int k, double alpha);

struct CellProjection {
  double resolution{0.05};
  Vec2 origin;
  double z_min{0.02};
  double z_max{1.5};
  int min_hits{3};
  /// Optional grid bounds; cells outside are dropped when set.
  std::optional<GridIndex> extent;
};

/// Projects a world-frame cloud onto grid cells. A cell is emitted when some
/// label has at least min_hits points in it; the label with most hits wins,
/// ties going to the smaller id. Cells with negative indices are dropped.
std::map<GridIndex, int> cloud_to_cells(const PointCloud& cloud, const CellProjection& proj);

struct PerceptionParams {
  int sor_k{10};
  double sor_alpha{1.0};
  double voxel_size{0.02};
  double z_min{0.02};
  double z_max{1.5};
  int min_hits{3};
};

/// depth_to_cloud -> robot frame -> world frame -> voxel reduction -> SOR
/// -> cell projection.
std::map<GridIndex, int> perceive_cells(const DepthImage& depth, const SegmentationMask& mask,
                                        const CameraIntrinsics& intr,
                                        const CameraExtrinsics& extr, const Pose2D& robot_pose,
                                        const GridGeometry& grid, const PerceptionParams& params);

/// True when the floor at world_xy projects into the image and the depth
/// there matches the floor, i.e. nothing stands on that spot right now.
bool floor_visible(const DepthImage& depth, const SegmentationMask& mask,
                   const CameraIntrinsics& intr, const CameraExtrinsics& extr,
                   const Pose2D& robot_pose, Vec2 world_xy);

}  // namespace namo
