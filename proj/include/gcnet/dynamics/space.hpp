#pragma once

#include <Eigen/Dense>

// Rotating-frame point-mass dynamics for the asteroid landing and the low-thrust
// transfer. The two right-hand sides are written out independently on purpose so
// tests can cross-check one against the other.
namespace gcnet::dyn {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector7d = Eigen::Matrix<double, 7, 1>;

/// Landing in a frame co-rotating with the asteroid at rate `omega` about z.
struct LandingParams {
  double mu = 1.0;
  double omega = 1.0;
  double c1 = 0.1;   // maximum thrust
  double isp = 1.0;  // specific impulse
  double g0 = 1.0;   // standard gravity used with isp

  double exhaust_velocity() const { return isp * g0; }
  void validate() const;
};

/// State (x, y, z, vx, vy, vz, m).
using LandingState = Vector7d;

/// Throttle u in [0, 1] and unit thrust direction t_hat.
Vector7d landing_derivative(const LandingState& x, double throttle, const Eigen::Vector3d& direction,
                            const LandingParams& p);

/// Transfer in a frame rotating with the target circular orbit of radius R.
struct TransferParams {
  double mu = 1.0;
  double radius = 1.0;  // R
  double gamma = 0.1;   // thrust acceleration magnitude

  /// sqrt(mu / R^3)
  double rotation_rate() const;
  Vector6d target_state() const;
  void validate() const;
};

using TransferState = Vector6d;

Vector6d transfer_derivative(const TransferState& x, const Eigen::Vector3d& direction, const TransferParams& p);

/// Rotating-frame energy 0.5|v|^2 - 0.5 w^2 (x^2 + y^2) - mu / r; conserved when unpowered.
double jacobi_constant(const Eigen::Vector3d& r, const Eigen::Vector3d& v, double mu, double rate);

/// Radius of the rotating-frame equilibrium on the x axis: (mu / w^2)^(1/3).
double synchronous_radius(double mu, double rate);

}  // namespace gcnet::dyn
