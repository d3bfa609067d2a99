#pragma once

#include <Eigen/Dense>

#include "gcnet/dynamics/space.hpp"

// State-costate systems for the two Pontryagin boundary-value problems.
//
// Transfer (time optimal): H = l_r . v + l_v . a(r, v, t) + 1, t* = -l_v / |l_v|.
// Landing (mass optimal, written in Lagrange form J = int c1/ve [u - eps u (1 - u)] dt,
// which equals m0 - m_f at eps = 0):
//   H = l_r . v + l_v . (g(r, v) + u c1/m t) - l_m u c1/ve + c1/ve [u - eps u (1 - u)],
//   switching function S = 1 - l_m - ve |l_v| / m, u* = clamp(1/2 - S / (2 eps), 0, 1).
namespace gcnet::ocp {

using Vector12d = Eigen::Matrix<double, 12, 1>;
using Vector14d = Eigen::Matrix<double, 14, 1>;

/// Unit vector opposite the primer. Throws NumericalError when |l_v| is zero.
Eigen::Vector3d primer_direction(const Eigen::Vector3d& lambda_v);

// --- transfer: y = (r, v, l_r, l_v) ---

Vector12d transfer_augmented_derivative(const Vector12d& y, const dyn::TransferParams& p);
/// Hamiltonian under an arbitrary unit thrust direction.
double transfer_hamiltonian(const Vector12d& y, const Eigen::Vector3d& direction, const dyn::TransferParams& p);
/// Hamiltonian under the optimal direction.
double transfer_hamiltonian(const Vector12d& y, const dyn::TransferParams& p);

// --- landing: y = (r, v, m, l_r, l_v, l_m) ---

double landing_switching_function(const Vector14d& y, const dyn::LandingParams& p);
/// Smoothed throttle for homotopy parameter eps; eps == 0 gives the bang-bang law.
double landing_throttle(double switching, double eps);
Vector14d landing_augmented_derivative(const Vector14d& y, double eps, const dyn::LandingParams& p);
double landing_hamiltonian(const Vector14d& y, double throttle, const Eigen::Vector3d& direction, double eps,
                           const dyn::LandingParams& p);
double landing_hamiltonian(const Vector14d& y, double eps, const dyn::LandingParams& p);

}  // namespace gcnet::ocp
