#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcnet/data/dataset.hpp"
#include "gcnet/ocp/shooting.hpp"

namespace gcnet::ocp {

/// Uniform perturbation of the initial state: component i is shifted by
/// U(-1, 1) * (absolute[i] + relative[i] * |x_i|). Empty vectors mean zero.
struct PerturbationLaw {
  std::vector<double> absolute;
  std::vector<double> relative;

  double half_width(std::size_t i, double x) const;
};

struct BundleConfig {
  std::size_t trajectories = 2000;
  std::size_t samples = 100;
  PerturbationLaw perturbation;
  std::uint64_t seed = 1;
  /// Fresh perturbation draws allowed per trajectory after the first one fails.
  int max_retries = 8;
  /// Intermediate initial states tried when the direct warm start fails.
  int continuation_substeps = 4;
  /// A converged extremal whose |H| exceeds this anywhere on the integration grid is
  /// re-solved with twice the steps, at most `max_refinements` times, and otherwise rejected.
  double hamiltonian_tolerance = 1e-9;
  int max_refinements = 3;
  /// 0 keeps the OpenMP default.
  int threads = 0;
};

/// Either space problem; `kind` selects which member is used.
struct SpaceProblem {
  Problem kind = Problem::Transfer;
  TransferProblem transfer;
  LandingProblem landing;
};

struct GenerationReport {
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::size_t attempts = 0;
  std::size_t converged_attempts = 0;
  std::size_t retries = 0;
  std::size_t continuation_rescues = 0;
  /// Produced trajectories that needed a finer integration grid.
  std::size_t refined = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double max_abs_hamiltonian = 0.0;
  double min_tf = 0.0;
  double max_tf = 0.0;
  double seconds = 0.0;
  /// Landing homotopy stages of the nominal whose final mass dropped (logged, not fatal).
  std::vector<std::string> warnings;

  double convergence_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(converged_attempts) / static_cast<double>(attempts);
  }
  std::string to_text() const;
};

struct Bundle {
  data::TrajectoryDataset dataset;
  GenerationReport report;
};

/// Solves one initial state with a warm start. Falls back to continuation along the
/// straight line from `from_state` when the direct warm start fails. Landing solves
/// start at the last homotopy stage.
ShootingSolution warm_solve(const SpaceProblem& problem, const ShootingSolution& from, const Eigen::VectorXd& x0,
                            const ShootingOptions& options, int continuation_substeps, bool* rescued = nullptr);

/// Cold solve of a nominal. Transfer: thrust continuation, falling back to heuristic guess
/// plus restarts. Landing: full homotopy.
ShootingSolution solve_nominal(const SpaceProblem& problem, const Eigen::VectorXd& x0, const ShootingOptions& options);

/// Node stride so that `samples` equally spaced samples fall on integration nodes.
int sampling_steps(int min_steps, std::size_t samples);

/// Perturbs the nominal initial state, warm-starts from the nominal unknowns and samples
/// each converged extremal. Throws NumericalError when fewer than half of the solve
/// attempts converge. Output does not depend on the thread count.
Bundle generate_bundle(const SpaceProblem& problem, const ShootingSolution& nominal, const BundleConfig& config,
                       const ShootingOptions& options);

/// Samples of one extremal: `samples` equally spaced nodes (the solution must have been
/// integrated with a step count that is a multiple of samples - 1). The auxiliary block
/// holds the shooting unknowns, the smoothing parameter and the step count.
void append_samples(data::TrajectoryDataset& ds, std::uint64_t id, const ShootingSolution& sol, std::size_t samples);

}  // namespace gcnet::ocp
