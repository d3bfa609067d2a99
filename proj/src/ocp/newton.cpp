#include "gcnet/ocp/newton.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"

namespace gcnet::ocp {

Eigen::MatrixXd fd_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Eigen::VectorXd fp = f(xp);
    const Eigen::VectorXd fm = f(xm);
    if (jac.size() == 0) jac.resize(fp.size(), n);
    jac.col(j) = (fp - fm) / (xp[j] - xm[j]);
  }
  return jac;
}

namespace {

bool try_eval(const ResidualFn& f, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  try {
    out = f(x);
  } catch (const NumericalError&) {
    return false;
  }
  return out.allFinite();
}

void polish(const ResidualFn& f, const NewtonOptions& opt, NewtonResult& res) {
  for (int k = 0; k < opt.polish_steps; ++k) {
    Eigen::VectorXd trial, r;
    try {
      const Eigen::MatrixXd jac = fd_jacobian(f, res.solution, opt.fd_step);
      trial = res.solution + jac.colPivHouseholderQr().solve(-res.residual);
    } catch (const NumericalError&) {
      return;
    }
    if (!trial.allFinite() || !try_eval(f, trial, r)) return;
    const double norm = r.lpNorm<Eigen::Infinity>();
    if (!(norm < res.residual_norm)) return;
    res.solution = trial;
    res.residual = r;
    res.residual_norm = norm;
  }
}

}  // namespace

NewtonResult newton_solve(const ResidualFn& f, const Eigen::VectorXd& guess, const NewtonOptions& opt,
                          const DomainFn& admissible) {
  NewtonResult res;
  res.solution = guess;
  if (!try_eval(f, guess, res.residual)) {
    res.residual_norm = std::numeric_limits<double>::infinity();
    res.message = "residual not finite at the initial guess";
    return res;
  }
  res.residual_norm = res.residual.lpNorm<Eigen::Infinity>();

  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (res.residual_norm < opt.tolerance) {
      res.converged = true;
      // A guess that already satisfies the tolerance is returned untouched.
      if (res.iterations > 0) polish(f, opt, res);
      return res;
    }
    Eigen::MatrixXd jac;
    try {
      jac = fd_jacobian(f, res.solution, opt.fd_step);
    } catch (const NumericalError& e) {
      res.message = fmt::format("jacobian evaluation failed: {}", e.what());
      return res;
    }
    if (!jac.allFinite()) {
      res.message = "non-finite jacobian";
      return res;
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-res.residual);
    if (!step.allFinite()) {
      res.message = "singular jacobian";
      return res;
    }
    const double merit = res.residual.squaredNorm();
    bool accepted = false;
    for (double s = 1.0; s >= opt.min_step; s *= 0.5) {
      const Eigen::VectorXd trial = res.solution + s * step;
      if (admissible && !admissible(trial)) continue;
      Eigen::VectorXd r;
      if (!try_eval(f, trial, r)) continue;
      if (r.squaredNorm() < (1.0 - 1e-4 * s) * merit) {
        res.solution = trial;
        res.residual = r;
        res.residual_norm = r.lpNorm<Eigen::Infinity>();
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.message = fmt::format("line search failed at residual {:.3e}", res.residual_norm);
      return res;
    }
  }
  res.converged = res.residual_norm < opt.tolerance;
  if (res.converged) polish(f, opt, res);
  if (!res.converged) res.message = fmt::format("max iterations reached, best residual {:.3e}", res.residual_norm);
  return res;
}

}  // namespace gcnet::ocp
