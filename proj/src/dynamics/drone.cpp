#include "gcnet/dynamics/drone.hpp"

#include <cmath>

#include "gcnet/common/error.hpp"
#include "gcnet/dynamics/rotation.hpp"

namespace gcnet::dyn {

void DroneParams::validate() const {
  if (!(inertia.minCoeff() > 0.0)) throw ConfigError("drone: inertia entries must be > 0");
  if (!(tau > 0.0)) throw ConfigError("drone: tau must be > 0");
  if (!(omega_max > omega_min && omega_min >= 0.0)) throw ConfigError("drone: need omega_max > omega_min >= 0");
  if (!(mass > 0.0)) throw ConfigError("drone: mass must be > 0");
}

Eigen::Vector3d body_velocity(const DroneState& x) {
  const Eigen::Vector3d euler = x.segment<3>(drone_index::euler);
  return rotation_body_to_world(euler).transpose() * x.segment<3>(drone_index::velocity);
}

Eigen::Vector3d drone_forces(const DroneState& x, const DroneParams& p) {
  const Eigen::Vector3d vb = body_velocity(x);
  const Eigen::Vector4d w = x.segment<4>(drone_index::rotor);
  const double sum_w = w.sum();
  const double sum_w2 = w.squaredNorm();
  return {-p.k_x * vb.x() * sum_w,
          -p.k_y * vb.y() * sum_w,
          -p.k_omega * sum_w2 - p.k_z * vb.z() * sum_w - p.k_h * (vb.x() * vb.x() + vb.y() * vb.y())};
}

Eigen::Vector3d drone_moments(const DroneState& x, const Eigen::Vector4d& rotor_accel, const DroneParams& p) {
  const Eigen::Vector3d vb = body_velocity(x);
  const Eigen::Vector4d w = x.segment<4>(drone_index::rotor);
  const Eigen::Vector4d w2 = w.cwiseProduct(w);
  const double r = x[drone_index::body_rate + 2];
  const Eigen::Vector4d& dw = rotor_accel;
  return {p.k_p * (w2[0] - w2[1] - w2[2] + w2[3]) + p.k_pv * vb.y(),
          p.k_q * (w2[0] + w2[1] - w2[2] - w2[3]) + p.k_qv * vb.x(),
          p.k_r1 * (-w[0] + w[1] - w[2] + w[3]) + p.k_r2 * (-dw[0] + dw[1] - dw[2] + dw[3]) - p.k_rr * r};
}

Eigen::Vector4d rotor_acceleration(const DroneState& x, const DroneControl& u, const DroneParams& p) {
  const Eigen::Vector4d w = x.segment<4>(drone_index::rotor);
  return ((p.omega_max - p.omega_min) * u + Eigen::Vector4d::Constant(p.omega_min) - w) / p.tau;
}

DroneState drone_derivative(const DroneState& x, const DroneControl& u, const DroneParams& p) {
  const Eigen::Vector3d euler = x.segment<3>(drone_index::euler);
  const Eigen::Vector3d omega = x.segment<3>(drone_index::body_rate);
  const Eigen::Vector4d dw = rotor_acceleration(x, u, p);
  const Eigen::Vector3d force = drone_forces(x, p);
  const Eigen::Vector3d moment = drone_moments(x, dw, p);
  const Eigen::Vector3d inertia_omega = p.inertia.cwiseProduct(omega);

  DroneState dx;
  dx.segment<3>(drone_index::position) = x.segment<3>(drone_index::velocity);
  dx.segment<3>(drone_index::velocity) =
      Eigen::Vector3d(0.0, 0.0, p.g) + rotation_body_to_world(euler) * force / p.mass;
  dx.segment<3>(drone_index::euler) = euler_rate_matrix(euler) * omega;
  dx.segment<3>(drone_index::body_rate) =
      (-omega.cross(inertia_omega) + moment + p.moment_ext).cwiseQuotient(p.inertia);
  dx.segment<4>(drone_index::rotor) = dw;
  return dx;
}

double hover_rotor_speed(const DroneParams& p) { return std::sqrt(p.mass * p.g / (4.0 * p.k_omega)); }

}  // namespace gcnet::dyn
