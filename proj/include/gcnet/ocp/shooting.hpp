#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcnet/common/problem.hpp"
#include "gcnet/dynamics/space.hpp"
#include "gcnet/ocp/newton.hpp"
#include "gcnet/ocp/pmp.hpp"

namespace gcnet::ocp {

struct TransferProblem {
  dyn::TransferParams params;
  /// Rendezvous with the rotating-frame point (R, 0, 0) at rest.
  dyn::Vector6d target() const { return params.target_state(); }
};

struct LandingProblem {
  dyn::LandingParams params;
  Eigen::Vector3d target_position{1.0, 0.0, 0.0};
  Eigen::Vector3d target_velocity{0.0, 0.0, 0.0};
};

inline const std::vector<double> kDefaultHomotopy{1.0, 0.5, 0.2, 0.1, 0.05, 0.01};

struct ShootingOptions {
  NewtonOptions newton;
  /// Fixed RK4 step count over [0, t_f]; the step is t_f / steps.
  int steps = 2000;
  /// Landing smoothing schedule; the last entry is the bang-bang stage.
  std::vector<double> homotopy = kDefaultHomotopy;
  /// Seeded random restarts used only when no initial guess is supplied.
  int restarts = 64;
  std::uint64_t seed = 1;
};

/// A converged (or best-effort) extremal with its dense state, costate and control history.
struct ShootingSolution {
  Problem problem = Problem::Transfer;
  bool converged = false;
  std::string message;
  Eigen::VectorXd initial_state;
  /// Initial costates followed by t_f: 7 entries for transfer, 8 for landing.
  Eigen::VectorXd unknowns;
  double tf = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  /// Landing smoothing parameter of the returned solution (0 for transfer).
  double homotopy = 0.0;
  /// Converged unknowns for each homotopy stage reached (landing only).
  std::vector<Eigen::VectorXd> stage_unknowns;
  std::vector<double> stage_final_mass;
  int failed_stage = -1;

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> costates;
  /// Transfer: unit direction (3). Landing: throttle then unit direction (4).
  std::vector<Eigen::VectorXd> controls;
  std::vector<double> hamiltonian;
};

// --- transfer ---

/// Terminal residual [r(t_f) - R i; v(t_f); H(t_f)] for unknowns (l_r0, l_v0, t_f).
Eigen::VectorXd transfer_residual(const TransferProblem& prob, const dyn::Vector6d& x0,
                                  const Eigen::VectorXd& unknowns, int steps);

/// Heuristic start: l_v against the velocity deficit with |l_v| = 1/Gamma, l_r = 0,
/// t_f from the time needed to cancel the velocity deficit and cover the distance.
Eigen::VectorXd transfer_initial_guess(const TransferProblem& prob, const dyn::Vector6d& x0);

/// Integrates the extremal defined by `unknowns` and records every step.
ShootingSolution transfer_extremal(const TransferProblem& prob, const dyn::Vector6d& x0,
                                   const Eigen::VectorXd& unknowns, int steps);

/// Newton single shooting. Without a guess, uses transfer_initial_guess and then
/// seeded random restarts around it.
ShootingSolution solve_transfer(const TransferProblem& prob, const dyn::Vector6d& x0,
                                const std::optional<Eigen::VectorXd>& guess, const ShootingOptions& options);

/// Cold start without a usable guess: solves a high-thrust version of the problem first and
/// lowers the thrust magnitude stage by stage down to prob.params.gamma, warm-starting
/// each stage. Steps that fail to converge are subdivided.
ShootingSolution solve_transfer_by_thrust_continuation(const TransferProblem& prob, const dyn::Vector6d& x0,
                                                       const ShootingOptions& options,
                                                       double start_factor = 20.0);

// --- landing ---

/// Terminal residual [r(t_f) - r_t; v(t_f) - v_t; l_m(t_f); H(t_f)] for
/// unknowns (l_r0, l_v0, l_m0, t_f) at smoothing `eps`.
Eigen::VectorXd landing_residual(const LandingProblem& prob, const dyn::Vector7d& x0,
                                 const Eigen::VectorXd& unknowns, double eps, int steps);

Eigen::VectorXd landing_initial_guess(const LandingProblem& prob, const dyn::Vector7d& x0);

ShootingSolution landing_extremal(const LandingProblem& prob, const dyn::Vector7d& x0,
                                  const Eigen::VectorXd& unknowns, double eps, int steps);

/// Homotopy continuation over options.homotopy starting at `first_stage`, each stage
/// warm-started from the previous one. `guess` must be valid for the smoothing of
/// `first_stage`; without a guess, stage 0 is bootstrapped with restarts.
ShootingSolution solve_landing(const LandingProblem& prob, const dyn::Vector7d& x0,
                               const std::optional<Eigen::VectorXd>& guess, const ShootingOptions& options,
                               std::size_t first_stage = 0);

}  // namespace gcnet::ocp
