#pragma once

#include "namo/control.hpp"
#include "namo/geometry.hpp"

namespace namo {

/// Differential-drive step under a constant twist. Integrates the unicycle
/// model exactly (circular arc), so the result does not depend on how the
/// interval is subdivided. Throws std::invalid_argument unless dt > 0.
Pose2D step_kinematics(const Pose2D& pose, const VelocityCommand& cmd, double dt);

}  // namespace namo
