#pragma once

#include <Eigen/Dense>

namespace gcnet::dyn {

/// Quadcopter model constants. Forces from the thrust/drag model are specific forces
/// when `mass` is 1 (the default), matching v' = g + R F.
struct DroneParams {
  double mass = 1.0;
  Eigen::Vector3d inertia{0.0, 0.0, 0.0};  // I_x, I_y, I_z
  double g = 9.81;
  double k_x = 0.0, k_y = 0.0, k_omega = 0.0, k_z = 0.0, k_h = 0.0;
  double k_p = 0.0, k_pv = 0.0, k_q = 0.0, k_qv = 0.0, k_r1 = 0.0, k_r2 = 0.0, k_rr = 0.0;
  double tau = 0.0;
  double omega_min = 0.0, omega_max = 0.0;
  Eigen::Vector3d moment_ext{0.0, 0.0, 0.0};

  void validate() const;
};

using DroneState = Eigen::Matrix<double, 16, 1>;
using DroneControl = Eigen::Vector4d;

// Component offsets inside DroneState.
namespace drone_index {
inline constexpr int position = 0;
inline constexpr int velocity = 3;
inline constexpr int euler = 6;
inline constexpr int body_rate = 9;
inline constexpr int rotor = 12;
}  // namespace drone_index

/// World-frame velocity expressed in the body frame: R(lambda)^T v.
Eigen::Vector3d body_velocity(const DroneState& x);

/// Thrust and drag in the body frame.
Eigen::Vector3d drone_forces(const DroneState& x, const DroneParams& p);

/// Body moments given the rotor accelerations from the motor lag.
Eigen::Vector3d drone_moments(const DroneState& x, const Eigen::Vector4d& rotor_accel, const DroneParams& p);

/// First-order motor lag towards the commanded speed.
Eigen::Vector4d rotor_acceleration(const DroneState& x, const DroneControl& u, const DroneParams& p);

DroneState drone_derivative(const DroneState& x, const DroneControl& u, const DroneParams& p);

/// Rotor speed giving F_z = -mass * g at rest: sqrt(mass * g / (4 k_omega)).
double hover_rotor_speed(const DroneParams& p);

}  // namespace gcnet::dyn
