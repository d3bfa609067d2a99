#include "gcnet/ocp/pmp.hpp"

#include <algorithm>
#include <cmath>

#include "gcnet/common/error.hpp"

namespace gcnet::ocp {

Eigen::Vector3d primer_direction(const Eigen::Vector3d& lambda_v) {
  const double n = lambda_v.norm();
  if (!(n > 0.0)) throw NumericalError("primer vector vanished; thrust direction undefined");
  return -lambda_v / n;
}

namespace {

// d/dr of l_v . (gravity + centrifugal) for a frame rotating at `rate` about z.
Eigen::Vector3d gravity_costate_term(const Eigen::Vector3d& r, const Eigen::Vector3d& lv, double mu, double rate) {
  const double rn = r.norm();
  if (!(rn > 0.0)) throw NumericalError("gravity singularity at r = 0");
  const double r3 = rn * rn * rn;
  const double r5 = r3 * rn * rn;
  const Eigen::Vector3d grav_grad_lv = -mu * (lv / r3 - 3.0 * r * r.dot(lv) / r5);
  return grav_grad_lv + Eigen::Vector3d(rate * rate * lv.x(), rate * rate * lv.y(), 0.0);
}

// d/dv of l_v . coriolis
Eigen::Vector3d coriolis_costate_term(const Eigen::Vector3d& lv, double rate) {
  return {-2.0 * rate * lv.y(), 2.0 * rate * lv.x(), 0.0};
}

Eigen::Vector3d rotating_acceleration(const Eigen::Vector3d& r, const Eigen::Vector3d& v, double mu, double rate) {
  const double rn = r.norm();
  if (!(rn > 0.0)) throw NumericalError("gravity singularity at r = 0");
  return -mu / (rn * rn * rn) * r +
         Eigen::Vector3d(2.0 * rate * v.y() + rate * rate * r.x(), -2.0 * rate * v.x() + rate * rate * r.y(), 0.0);
}

}  // namespace

Vector12d transfer_augmented_derivative(const Vector12d& y, const dyn::TransferParams& p) {
  const Eigen::Vector3d r = y.segment<3>(0);
  const Eigen::Vector3d v = y.segment<3>(3);
  const Eigen::Vector3d lr = y.segment<3>(6);
  const Eigen::Vector3d lv = y.segment<3>(9);
  const double rate = p.rotation_rate();
  const Eigen::Vector3d t = primer_direction(lv);
  Vector12d dy;
  dy.segment<3>(0) = v;
  dy.segment<3>(3) = rotating_acceleration(r, v, p.mu, rate) + p.gamma * t;
  dy.segment<3>(6) = -gravity_costate_term(r, lv, p.mu, rate);
  dy.segment<3>(9) = -lr - coriolis_costate_term(lv, rate);
  return dy;
}

double transfer_hamiltonian(const Vector12d& y, const Eigen::Vector3d& direction, const dyn::TransferParams& p) {
  const Eigen::Vector3d r = y.segment<3>(0);
  const Eigen::Vector3d v = y.segment<3>(3);
  const Eigen::Vector3d a = rotating_acceleration(r, v, p.mu, p.rotation_rate()) + p.gamma * direction;
  return y.segment<3>(6).dot(v) + y.segment<3>(9).dot(a) + 1.0;
}

double transfer_hamiltonian(const Vector12d& y, const dyn::TransferParams& p) {
  return transfer_hamiltonian(y, primer_direction(y.segment<3>(9)), p);
}

double landing_switching_function(const Vector14d& y, const dyn::LandingParams& p) {
  return 1.0 - y[13] - p.exhaust_velocity() * y.segment<3>(10).norm() / y[6];
}

double landing_throttle(double switching, double eps) {
  if (eps <= 0.0) return switching > 0.0 ? 0.0 : 1.0;
  return std::clamp(0.5 - switching / (2.0 * eps), 0.0, 1.0);
}

Vector14d landing_augmented_derivative(const Vector14d& y, double eps, const dyn::LandingParams& p) {
  const Eigen::Vector3d r = y.segment<3>(0);
  const Eigen::Vector3d v = y.segment<3>(3);
  const double m = y[6];
  const Eigen::Vector3d lr = y.segment<3>(7);
  const Eigen::Vector3d lv = y.segment<3>(10);
  if (!(m > 0.0)) throw NumericalError("landing: mass must stay positive");
  const double w = p.omega;
  const Eigen::Vector3d t = primer_direction(lv);
  const double u = landing_throttle(landing_switching_function(y, p), eps);
  const double thrust = u * p.c1 / m;
  Vector14d dy;
  dy.segment<3>(0) = v;
  dy.segment<3>(3) = rotating_acceleration(r, v, p.mu, w) + thrust * t;
  dy[6] = -u * p.c1 / p.exhaust_velocity();
  dy.segment<3>(7) = -gravity_costate_term(r, lv, p.mu, w);
  dy.segment<3>(10) = -lr - coriolis_costate_term(lv, w);
  // -dH/dm = u c1 / m^2 (l_v . t) = -u c1 |l_v| / m^2
  dy[13] = -u * p.c1 * lv.norm() / (m * m);
  return dy;
}

double landing_hamiltonian(const Vector14d& y, double u, const Eigen::Vector3d& direction, double eps,
                           const dyn::LandingParams& p) {
  const Eigen::Vector3d r = y.segment<3>(0);
  const Eigen::Vector3d v = y.segment<3>(3);
  const double m = y[6];
  const double ve = p.exhaust_velocity();
  const Eigen::Vector3d a = rotating_acceleration(r, v, p.mu, p.omega) + u * p.c1 / m * direction;
  return y.segment<3>(7).dot(v) + y.segment<3>(10).dot(a) - y[13] * u * p.c1 / ve +
         p.c1 / ve * (u - eps * u * (1.0 - u));
}

double landing_hamiltonian(const Vector14d& y, double eps, const dyn::LandingParams& p) {
  const double u = landing_throttle(landing_switching_function(y, p), eps);
  return landing_hamiltonian(y, u, primer_direction(y.segment<3>(10)), eps, p);
}

}  // namespace gcnet::ocp
