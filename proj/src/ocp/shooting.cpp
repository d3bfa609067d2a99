#include "gcnet/ocp/shooting.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"
#include "gcnet/dynamics/rk4.hpp"

namespace gcnet::ocp {

namespace {

bool positive_tf(const Eigen::VectorXd& z) { return z[z.size() - 1] > 0.0; }

Vector12d transfer_start(const dyn::Vector6d& x0, const Eigen::VectorXd& z) {
  Vector12d y;
  y.head<6>() = x0;
  y.tail<6>() = z.head<6>();
  return y;
}

Vector14d landing_start(const dyn::Vector7d& x0, const Eigen::VectorXd& z) {
  Vector14d y;
  y.head<7>() = x0;
  y.tail<7>() = z.head<7>();
  return y;
}

void copy_newton(ShootingSolution& sol, const NewtonResult& nr) {
  sol.converged = nr.converged;
  sol.message = nr.message;
  sol.unknowns = nr.solution;
  sol.residual_norm = nr.residual_norm;
  sol.iterations += nr.iterations;
}

Eigen::Vector3d unit_or(const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
  const double n = v.norm();
  return n > 1e-12 ? Eigen::Vector3d(v / n) : fallback;
}

// Restart around a heuristic guess: rotate/scale the primer, jitter l_r and t_f.
// Throttle saturation surfaces SF = +-eps where the landing right-hand side has kinks.
auto landing_guards(const dyn::LandingParams& params, double eps) {
  return [&params, eps](const Vector14d& y) {
    const double sf = landing_switching_function(y, params);
    return std::array<double, 2>{sf - eps, sf + eps};
  };
}

Eigen::VectorXd jitter_guess(const Eigen::VectorXd& base, std::size_t primer_offset, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> tf_scale(0.5, 2.0);
  Eigen::VectorXd g = base;
  Eigen::Vector3d lv = base.segment<3>(static_cast<Eigen::Index>(primer_offset));
  const double mag = lv.norm();
  const Eigen::Vector3d noise(normal(rng), normal(rng), normal(rng));
  lv = unit_or(lv / mag + 0.7 * noise, noise) * mag * std::exp(0.5 * normal(rng));
  g.segment<3>(static_cast<Eigen::Index>(primer_offset)) = lv;
  for (Eigen::Index i = 0; i < 3; ++i) g[i] = 0.5 * mag * normal(rng);
  g[g.size() - 1] *= tf_scale(rng);
  return g;
}

}  // namespace

// ----------------------------------------------------------------------------
// transfer

Eigen::VectorXd transfer_residual(const TransferProblem& prob, const dyn::Vector6d& x0,
                                  const Eigen::VectorXd& z, int steps) {
  const double tf = z[6];
  auto rhs = [&prob](double, const Vector12d& y) { return transfer_augmented_derivative(y, prob.params); };
  const Vector12d yf = dyn::rk4_uniform(rhs, transfer_start(x0, z), 0.0, tf, steps);
  Eigen::VectorXd res(7);
  res.head<6>() = yf.head<6>() - prob.target();
  res[6] = transfer_hamiltonian(yf, prob.params);
  return res;
}

Eigen::VectorXd transfer_initial_guess(const TransferProblem& prob, const dyn::Vector6d& x0) {
  const dyn::Vector6d target = prob.target();
  const Eigen::Vector3d dr = target.head<3>() - x0.head<3>();
  const Eigen::Vector3d dv0 = target.tail<3>() - x0.tail<3>();
  const double gamma = prob.params.gamma;
  const double tf = dv0.norm() / gamma + 2.0 * std::sqrt(dr.norm() / gamma);
  const Eigen::Vector3d deficit = dv0 + dr / tf;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(7);
  z.segment<3>(3) = -unit_or(deficit, Eigen::Vector3d::UnitX()) / gamma;
  z[6] = tf;
  return z;
}

ShootingSolution transfer_extremal(const TransferProblem& prob, const dyn::Vector6d& x0,
                                   const Eigen::VectorXd& z, int steps) {
  ShootingSolution sol;
  sol.problem = Problem::Transfer;
  sol.initial_state = x0;
  sol.unknowns = z;
  sol.tf = z[6];
  auto rhs = [&prob](double, const Vector12d& y) { return transfer_augmented_derivative(y, prob.params); };
  dyn::rk4_uniform(rhs, transfer_start(x0, z), 0.0, sol.tf, steps, [&](int, double t, const Vector12d& y) {
    sol.times.push_back(t);
    sol.states.emplace_back(y.head<6>());
    sol.costates.emplace_back(y.tail<6>());
    sol.controls.emplace_back(primer_direction(y.segment<3>(9)));
    sol.hamiltonian.push_back(transfer_hamiltonian(y, prob.params));
  });
  Eigen::VectorXd res(7);
  res.head<6>() = sol.states.back() - prob.target();
  res[6] = sol.hamiltonian.back();
  sol.residual_norm = res.lpNorm<Eigen::Infinity>();
  return sol;
}

ShootingSolution solve_transfer(const TransferProblem& prob, const dyn::Vector6d& x0,
                                const std::optional<Eigen::VectorXd>& guess, const ShootingOptions& options) {
  prob.params.validate();
  if ((x0 - prob.target()).lpNorm<Eigen::Infinity>() == 0.0) {
    ShootingSolution sol;
    sol.problem = Problem::Transfer;
    sol.converged = true;
    sol.message = "initial state is the target; degenerate t_f = 0 solution";
    sol.initial_state = x0;
    sol.unknowns = Eigen::VectorXd::Zero(7);
    sol.times = {0.0};
    sol.states = {x0};
    return sol;
  }
  const ResidualFn residual = [&](const Eigen::VectorXd& z) {
    return transfer_residual(prob, x0, z, options.steps);
  };

  ShootingSolution best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  const auto attempt = [&](const Eigen::VectorXd& start) {
    const NewtonResult nr = newton_solve(residual, start, options.newton, positive_tf);
    total_iterations += nr.iterations;
    if (nr.converged || nr.residual_norm < best.residual_norm) {
      best = ShootingSolution{};
      copy_newton(best, nr);
    }
    return nr.converged;
  };

  bool ok = false;
  if (guess) {
    ok = attempt(*guess);
  } else {
    const Eigen::VectorXd base = transfer_initial_guess(prob, x0);
    ok = attempt(base);
    Rng rng(options.seed);
    for (int r = 0; !ok && r < options.restarts; ++r) ok = attempt(jitter_guess(base, 3, rng));
  }

  if (!ok) {
    best.problem = Problem::Transfer;
    best.initial_state = x0;
    best.iterations = total_iterations;
    best.message = fmt::format("transfer shooting did not converge (best residual {:.3e}): {}",
                               best.residual_norm, best.message);
    return best;
  }
  ShootingSolution sol = transfer_extremal(prob, x0, best.unknowns, options.steps);
  sol.converged = true;
  sol.iterations = total_iterations;
  return sol;
}

ShootingSolution solve_transfer_by_thrust_continuation(const TransferProblem& prob, const dyn::Vector6d& x0,
                                                       const ShootingOptions& options, double start_factor) {
  prob.params.validate();
  if (!(start_factor >= 1.0)) throw ConfigError("thrust continuation needs start_factor >= 1");
  const double target_gamma = prob.params.gamma;
  TransferProblem stage = prob;
  stage.params.gamma = target_gamma * start_factor;
  ShootingSolution sol = solve_transfer(stage, x0, std::nullopt, options);
  if (!sol.converged) return sol;

  // Continuation in log(gamma) with an adaptive step.
  double log_gamma = std::log(stage.params.gamma);
  const double log_target = std::log(target_gamma);
  double step = std::log(0.85);
  int total_iterations = sol.iterations;
  Eigen::VectorXd current = sol.unknowns;
  while (log_gamma > log_target) {
    const double next = std::max(log_target, log_gamma + step);
    stage.params.gamma = next == log_target ? target_gamma : std::exp(next);
    const ResidualFn residual = [&](const Eigen::VectorXd& z) {
      return transfer_residual(stage, x0, z, options.steps);
    };
    const NewtonResult nr = newton_solve(residual, current, options.newton, positive_tf);
    total_iterations += nr.iterations;
    if (nr.converged) {
      current = nr.solution;
      log_gamma = next;
      step = std::max(step * 1.5, std::log(0.5));
      continue;
    }
    step *= 0.5;
    if (step > std::log(0.999)) {
      ShootingSolution failed;
      failed.problem = Problem::Transfer;
      failed.initial_state = x0;
      failed.unknowns = nr.solution;
      failed.residual_norm = nr.residual_norm;
      failed.iterations = total_iterations;
      failed.message = fmt::format("thrust continuation stalled at gamma = {:.6g}: {}", std::exp(log_gamma), nr.message);
      return failed;
    }
  }
  sol = transfer_extremal(prob, x0, current, options.steps);
  sol.converged = sol.residual_norm < options.newton.tolerance;
  sol.iterations = total_iterations;
  if (!sol.converged) sol.message = fmt::format("thrust continuation ended at residual {:.3e}", sol.residual_norm);
  return sol;
}

// ----------------------------------------------------------------------------
// landing

Eigen::VectorXd landing_residual(const LandingProblem& prob, const dyn::Vector7d& x0, const Eigen::VectorXd& z,
                                 double eps, int steps) {
  const double tf = z[7];
  auto rhs = [&](double, const Vector14d& y) { return landing_augmented_derivative(y, eps, prob.params); };
  const Vector14d yf = dyn::rk4_uniform_guarded(rhs, landing_guards(prob.params, eps), landing_start(x0, z), 0.0, tf,
                                                 steps, [](int, double, const Vector14d&) {});
  Eigen::VectorXd res(8);
  res.head<3>() = yf.segment<3>(0) - prob.target_position;
  res.segment<3>(3) = yf.segment<3>(3) - prob.target_velocity;
  res[6] = yf[13];
  res[7] = landing_hamiltonian(yf, eps, prob.params);
  return res;
}

Eigen::VectorXd landing_initial_guess(const LandingProblem& prob, const dyn::Vector7d& x0) {
  const Eigen::Vector3d dr = prob.target_position - x0.head<3>();
  const Eigen::Vector3d dv0 = prob.target_velocity - x0.segment<3>(3);
  const double accel = prob.params.c1 / x0[6];
  const double tf = dv0.norm() / accel + 2.0 * std::sqrt(dr.norm() / accel);
  const Eigen::Vector3d deficit = dv0 + dr / tf;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(8);
  // |l_v| = m / ve puts the switching function at zero, i.e. mid throttle at eps = 1.
  z.segment<3>(3) = -unit_or(deficit, Eigen::Vector3d::UnitX()) * x0[6] / prob.params.exhaust_velocity();
  z[7] = tf;
  return z;
}

ShootingSolution landing_extremal(const LandingProblem& prob, const dyn::Vector7d& x0, const Eigen::VectorXd& z,
                                  double eps, int steps) {
  ShootingSolution sol;
  sol.problem = Problem::Landing;
  sol.initial_state = x0;
  sol.unknowns = z;
  sol.tf = z[7];
  sol.homotopy = eps;
  auto rhs = [&](double, const Vector14d& y) { return landing_augmented_derivative(y, eps, prob.params); };
  const auto guards = landing_guards(prob.params, eps);
  dyn::rk4_uniform_guarded(rhs, guards, landing_start(x0, z), 0.0, sol.tf, steps, [&](int, double t, const Vector14d& y) {
    sol.times.push_back(t);
    sol.states.emplace_back(y.head<7>());
    sol.costates.emplace_back(y.tail<7>());
    Eigen::VectorXd u(4);
    u[0] = landing_throttle(landing_switching_function(y, prob.params), eps);
    u.tail<3>() = primer_direction(y.segment<3>(10));
    sol.controls.push_back(u);
    sol.hamiltonian.push_back(landing_hamiltonian(y, eps, prob.params));
  });
  const Eigen::VectorXd& xf = sol.states.back();
  Eigen::VectorXd res(8);
  res.head<3>() = xf.head<3>() - prob.target_position;
  res.segment<3>(3) = xf.segment<3>(3) - prob.target_velocity;
  res[6] = sol.costates.back()[6];
  res[7] = sol.hamiltonian.back();
  sol.residual_norm = res.lpNorm<Eigen::Infinity>();
  return sol;
}

ShootingSolution solve_landing(const LandingProblem& prob, const dyn::Vector7d& x0,
                               const std::optional<Eigen::VectorXd>& guess, const ShootingOptions& options,
                               std::size_t first_stage) {
  prob.params.validate();
  if (options.homotopy.empty() || first_stage >= options.homotopy.size())
    throw ConfigError("solve_landing: empty homotopy schedule or bad first stage");

  ShootingSolution out;
  out.problem = Problem::Landing;
  out.initial_state = x0;
  Eigen::VectorXd current;
  int total_iterations = 0;

  for (std::size_t stage = first_stage; stage < options.homotopy.size(); ++stage) {
    const double eps = options.homotopy[stage];
    const ResidualFn residual = [&](const Eigen::VectorXd& z) {
      return landing_residual(prob, x0, z, eps, options.steps);
    };
    NewtonResult nr;
    if (stage == first_stage && !guess) {
      const Eigen::VectorXd base = landing_initial_guess(prob, x0);
      nr = newton_solve(residual, base, options.newton, positive_tf);
      total_iterations += nr.iterations;
      Rng rng(options.seed);
      for (int r = 0; !nr.converged && r < options.restarts; ++r) {
        nr = newton_solve(residual, jitter_guess(base, 3, rng), options.newton, positive_tf);
        total_iterations += nr.iterations;
      }
    } else {
      nr = newton_solve(residual, stage == first_stage ? *guess : current, options.newton, positive_tf);
      total_iterations += nr.iterations;
    }
    if (!nr.converged) {
      out.converged = false;
      out.failed_stage = static_cast<int>(stage);
      out.unknowns = nr.solution;
      out.residual_norm = nr.residual_norm;
      out.homotopy = eps;
      out.iterations = total_iterations;
      out.message = fmt::format("landing homotopy stage {} (eps = {}) did not converge, best residual {:.3e}: {}",
                                stage, eps, nr.residual_norm, nr.message);
      return out;
    }
    current = nr.solution;
    out.stage_unknowns.push_back(current);
  }

  const double eps = options.homotopy.back();
  ShootingSolution sol = landing_extremal(prob, x0, current, eps, options.steps);
  sol.converged = true;
  sol.iterations = total_iterations;
  sol.stage_unknowns = std::move(out.stage_unknowns);
  for (std::size_t i = 0; i < sol.stage_unknowns.size(); ++i) {
    const double stage_eps = options.homotopy[first_stage + i];
    const ShootingSolution s = landing_extremal(prob, x0, sol.stage_unknowns[i], stage_eps, options.steps);
    sol.stage_final_mass.push_back(s.states.back()[6]);
  }
  return sol;
}

}  // namespace gcnet::ocp
