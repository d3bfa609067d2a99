#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace gcnet::ocp {

struct NewtonOptions {
  double tolerance = 1e-10;  // on the infinity norm of the residual
  int max_iterations = 50;
  double fd_step = 1e-7;     // relative central-difference step
  double min_step = 1.0 / 1024.0;
  /// Extra full Newton steps taken after convergence, kept only while they reduce the residual.
  int polish_steps = 2;
};

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;  // infinity norm at `solution`
  Eigen::VectorXd solution;
  Eigen::VectorXd residual;
  std::string message;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
/// Returns false for unknowns outside the admissible domain (e.g. t_f <= 0).
using DomainFn = std::function<bool(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of `f` at `x`.
Eigen::MatrixXd fd_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double rel_step);

/// Damped Newton iteration with a finite-difference Jacobian and step halving on the
/// squared 2-norm merit. Residual evaluations that throw NumericalError are treated as
/// failed trial points.
NewtonResult newton_solve(const ResidualFn& f, const Eigen::VectorXd& guess, const NewtonOptions& options,
                          const DomainFn& admissible = {});

}  // namespace gcnet::ocp
