#pragma once

#include <array>
#include <cmath>

// Planar poses as 3x3 homogeneous matrices, multiplied out longhand.
namespace oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 pose_matrix(double x, double y, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{{c, -s, x}, {s, c, y}, {0.0, 0.0, 1.0}}};
}

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        sum += a[i][k] * b[k][j];
      }
      out[i][j] = sum;
    }
  }
  return out;
}

struct PlanarPose {
  double x, y, theta;
};

inline PlanarPose from_matrix(const Mat3& m) { return {m[0][2], m[1][2], std::atan2(m[1][0], m[0][0])}; }

inline std::array<double, 2> apply(const Mat3& m, double x, double y) {
  return {m[0][0] * x + m[0][1] * y + m[0][2], m[1][0] * x + m[1][1] * y + m[1][2]};
}

}  // namespace oracle
