#include "gcnet/dynamics/rotation.hpp"

#include <cmath>

#include "gcnet/common/error.hpp"

namespace gcnet::dyn {

Eigen::Matrix3d rotation_body_to_world(const Eigen::Vector3d& euler) {
  const double cf = std::cos(euler[0]), sf = std::sin(euler[0]);
  const double ct = std::cos(euler[1]), st = std::sin(euler[1]);
  const double cp = std::cos(euler[2]), sp = std::sin(euler[2]);
  Eigen::Matrix3d r;
  r << ct * cp, -cf * sp + sf * st * cp, sf * sp + cf * st * cp,
       ct * sp, cf * cp + sf * st * sp, -sf * cp + cf * st * sp,
       -st, sf * ct, cf * ct;
  return r;
}

Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& euler) {
  const double cf = std::cos(euler[0]), sf = std::sin(euler[0]);
  const double ct = std::cos(euler[1]);
  if (std::abs(ct) < 1e-9) throw NumericalError("euler_rate_matrix: gimbal lock (cos(theta) ~ 0)");
  const double tt = std::tan(euler[1]);
  Eigen::Matrix3d q;
  q << 1.0, sf * tt, cf * tt,
       0.0, cf, -sf,
       0.0, sf / ct, cf / ct;
  return q;
}

Eigen::Matrix3d body_rate_matrix(const Eigen::Vector3d& euler) {
  const double cf = std::cos(euler[0]), sf = std::sin(euler[0]);
  const double ct = std::cos(euler[1]), st = std::sin(euler[1]);
  Eigen::Matrix3d w;
  w << 1.0, 0.0, -st,
       0.0, cf, sf * ct,
       0.0, -sf, cf * ct;
  return w;
}

}  // namespace gcnet::dyn
