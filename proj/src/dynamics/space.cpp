#include "gcnet/dynamics/space.hpp"

#include <cmath>

#include "gcnet/common/error.hpp"

namespace gcnet::dyn {

void LandingParams::validate() const {
  if (!(mu > 0.0 && omega > 0.0 && c1 > 0.0 && isp > 0.0 && g0 > 0.0))
    throw ConfigError("landing parameters mu, omega, c1, isp, g0 must all be > 0");
}

Vector7d landing_derivative(const LandingState& x, double u, const Eigen::Vector3d& t, const LandingParams& p) {
  const double m = x[6];
  const double r = x.head<3>().norm();
  if (!(m > 0.0)) throw NumericalError("landing_derivative: mass must stay positive");
  if (!(r > 0.0)) throw NumericalError("landing_derivative: gravity singularity at r = 0");
  const double mu_r3 = p.mu / (r * r * r);
  const double w = p.omega;
  const double thrust = u * p.c1 / m;
  Vector7d dx;
  dx[0] = x[3];
  dx[1] = x[4];
  dx[2] = x[5];
  dx[3] = -mu_r3 * x[0] + 2.0 * w * x[4] + w * w * x[0] + thrust * t[0];
  dx[4] = -mu_r3 * x[1] - 2.0 * w * x[3] + w * w * x[1] + thrust * t[1];
  dx[5] = -mu_r3 * x[2] + thrust * t[2];
  dx[6] = -u * p.c1 / p.exhaust_velocity();
  return dx;
}

double TransferParams::rotation_rate() const { return std::sqrt(mu / (radius * radius * radius)); }

Vector6d TransferParams::target_state() const {
  Vector6d s = Vector6d::Zero();
  s[0] = radius;
  return s;
}

void TransferParams::validate() const {
  if (!(mu > 0.0 && radius > 0.0 && gamma >= 0.0))
    throw ConfigError("transfer parameters need mu > 0, R > 0, gamma >= 0");
}

Vector6d transfer_derivative(const TransferState& x, const Eigen::Vector3d& t, const TransferParams& p) {
  const Eigen::Vector3d pos = x.head<3>();
  const Eigen::Vector3d vel = x.tail<3>();
  const double r = pos.norm();
  if (!(r > 0.0)) throw NumericalError("transfer_derivative: gravity singularity at r = 0");
  const double rate = p.rotation_rate();
  const Eigen::Vector3d gravity = -p.mu / (r * r * r) * pos;
  const Eigen::Vector3d coriolis(2.0 * rate * vel.y(), -2.0 * rate * vel.x(), 0.0);
  const Eigen::Vector3d centrifugal(rate * rate * pos.x(), rate * rate * pos.y(), 0.0);
  Vector6d dx;
  dx.head<3>() = vel;
  dx.tail<3>() = gravity + coriolis + centrifugal + p.gamma * t;
  return dx;
}

double jacobi_constant(const Eigen::Vector3d& r, const Eigen::Vector3d& v, double mu, double rate) {
  return 0.5 * v.squaredNorm() - 0.5 * rate * rate * (r.x() * r.x() + r.y() * r.y()) - mu / r.norm();
}

double synchronous_radius(double mu, double rate) { return std::cbrt(mu / (rate * rate)); }

}  // namespace gcnet::dyn
