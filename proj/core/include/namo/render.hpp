#pragma once

#include <vector>

#include "namo/geometry.hpp"
#include "namo/perception.hpp"

namespace namo {

/// Vertical extrusion of a convex CCW outline from the floor to `height`.
struct Prism {
  /// Mask id written for pixels that see this prism; 0 for walls.
  int label{0};
  Polygon outline;
  double height{0.4};
};

struct RenderScene {
  std::vector<Prism> prisms;
  /// Returns farther than this along the optical axis are dropped.
  double max_depth{6.0};
};

struct RenderedView {
  DepthImage depth;
  SegmentationMask mask;
};

/// Ray-casts a depth image and an exact instance mask. Each pixel keeps the
/// nearest surface (prism side, prism top or floor), so closer geometry
/// occludes farther geometry. The floor and walls carry label 0.
RenderedView render_view(const RenderScene& scene, const CameraIntrinsics& intr,
                         const CameraExtrinsics& extr, const Pose2D& robot_pose);

}  // namespace namo
