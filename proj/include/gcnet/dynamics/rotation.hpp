#pragma once

#include <Eigen/Dense>

namespace gcnet::dyn {

/// Body-to-world rotation for Euler angles (phi, theta, psi), Z-Y-X convention.
Eigen::Matrix3d rotation_body_to_world(const Eigen::Vector3d& euler);

/// Maps body rates (p, q, r) to Euler-angle rates. Throws NumericalError when
/// |cos(theta)| < 1e-9 (gimbal lock).
Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& euler);

/// Maps Euler-angle rates to body rates; the inverse of euler_rate_matrix.
Eigen::Matrix3d body_rate_matrix(const Eigen::Vector3d& euler);

}  // namespace gcnet::dyn
