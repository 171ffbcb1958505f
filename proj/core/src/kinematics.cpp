#include "namo/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace namo {

Pose2D step_kinematics(const Pose2D& pose, const VelocityCommand& cmd, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be > 0");
  }
  const double dtheta = cmd.omega * dt;
  if (std::abs(dtheta) < 1e-12) {
    return Pose2D::make(pose.x + cmd.v * std::cos(pose.theta) * dt,
                        pose.y + cmd.v * std::sin(pose.theta) * dt, pose.theta + dtheta);
  }
  const double r = cmd.v / cmd.omega;
  const double theta1 = pose.theta + dtheta;
  return Pose2D::make(pose.x + r * (std::sin(theta1) - std::sin(pose.theta)),
                      pose.y - r * (std::cos(theta1) - std::cos(pose.theta)), theta1);
}

}  // namespace namo
