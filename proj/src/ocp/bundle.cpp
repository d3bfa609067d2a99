#include "gcnet/ocp/bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include <fmt/format.h>
#include <omp.h>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"

namespace gcnet::ocp {

double PerturbationLaw::half_width(std::size_t i, double x) const {
  const double a = i < absolute.size() ? absolute[i] : 0.0;
  const double r = i < relative.size() ? relative[i] : 0.0;
  return a + r * std::abs(x);
}

std::string GenerationReport::to_text() const {
  std::string out;
  out += fmt::format("requested trajectories: {}\n", requested);
  out += fmt::format("produced trajectories: {}\n", produced);
  out += fmt::format("solve attempts: {} ({} converged, rate {:.4f})\n", attempts, converged_attempts,
                     convergence_rate());
  out += fmt::format("retries: {}\n", retries);
  out += fmt::format("continuation rescues: {}\n", continuation_rescues);
  out += fmt::format("refined integration grids: {}\n", refined);
  out += fmt::format("residual inf-norm: max {:.3e}, mean {:.3e}\n", max_residual, mean_residual);
  out += fmt::format("max |H|: {:.3e}\n", max_abs_hamiltonian);
  out += fmt::format("t_f range: [{:.6g}, {:.6g}]\n", min_tf, max_tf);
  out += fmt::format("wall time: {:.2f} s\n", seconds);
  for (const auto& w : warnings) out += "warning: " + w + "\n";
  return out;
}

namespace {

ShootingSolution solve_from(const SpaceProblem& problem, const Eigen::VectorXd& x0, const Eigen::VectorXd& guess,
                            const ShootingOptions& options) {
  if (problem.kind == Problem::Transfer) return solve_transfer(problem.transfer, x0, guess, options);
  return solve_landing(problem.landing, x0, guess, options, options.homotopy.size() - 1);
}

double max_abs_hamiltonian(const ShootingSolution& sol) {
  double m = 0.0;
  for (double h : sol.hamiltonian) m = std::max(m, std::abs(h));
  return m;
}

std::size_t expected_state_dim(const SpaceProblem& p) {
  if (p.kind == Problem::Drone) throw ConfigError("bundle generation supports the transfer and landing problems only");
  return state_dim(p.kind);
}

}  // namespace

ShootingSolution warm_solve(const SpaceProblem& problem, const ShootingSolution& from, const Eigen::VectorXd& x0,
                            const ShootingOptions& options, int continuation_substeps, bool* rescued) {
  if (rescued) *rescued = false;
  ShootingSolution sol = solve_from(problem, x0, from.unknowns, options);
  if (sol.converged || continuation_substeps <= 1) return sol;

  Eigen::VectorXd guess = from.unknowns;
  const Eigen::VectorXd start = from.initial_state;
  for (int s = 1; s <= continuation_substeps; ++s) {
    const double w = static_cast<double>(s) / continuation_substeps;
    const Eigen::VectorXd xs = start + w * (x0 - start);
    ShootingSolution step = solve_from(problem, xs, guess, options);
    if (!step.converged) return sol;
    guess = step.unknowns;
    if (s == continuation_substeps) {
      if (rescued) *rescued = true;
      return step;
    }
  }
  return sol;
}

ShootingSolution solve_nominal(const SpaceProblem& problem, const Eigen::VectorXd& x0, const ShootingOptions& options) {
  expected_state_dim(problem);
  if (problem.kind == Problem::Transfer) {
    ShootingSolution sol = solve_transfer_by_thrust_continuation(problem.transfer, x0, options);
    if (sol.converged) return sol;
    ShootingSolution direct = solve_transfer(problem.transfer, x0, std::nullopt, options);
    if (!direct.converged) direct.message = sol.message + "; direct restarts: " + direct.message;
    return direct;
  }
  return solve_landing(problem.landing, x0, std::nullopt, options);
}

int sampling_steps(int min_steps, std::size_t samples) {
  if (samples < 2) throw ConfigError("at least two samples per trajectory are required");
  const int stride = static_cast<int>(samples - 1);
  return std::max(1, (min_steps + stride - 1) / stride) * stride;
}

void append_samples(data::TrajectoryDataset& ds, std::uint64_t id, const ShootingSolution& sol, std::size_t samples) {
  const std::size_t nodes = sol.times.size();
  if (samples < 2 || nodes < 2 || (nodes - 1) % (samples - 1) != 0)
    throw ConfigError(fmt::format("cannot take {} samples from a solution with {} nodes", samples, nodes));
  const std::size_t stride = (nodes - 1) / (samples - 1);
  std::vector<double> times, states, controls;
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t n = k * stride;
    times.push_back(sol.times[n]);
    states.insert(states.end(), sol.states[n].data(), sol.states[n].data() + sol.states[n].size());
    controls.insert(controls.end(), sol.controls[n].data(), sol.controls[n].data() + sol.controls[n].size());
  }
  std::vector<double> aux(sol.unknowns.data(), sol.unknowns.data() + sol.unknowns.size());
  aux.push_back(sol.homotopy);
  aux.push_back(static_cast<double>(nodes - 1));
  ds.append_trajectory(id, times, states, controls, sol.tf, aux);
}

Bundle generate_bundle(const SpaceProblem& problem, const ShootingSolution& nominal, const BundleConfig& config,
                       const ShootingOptions& options) {
  const std::size_t sd = expected_state_dim(problem);
  if (!nominal.converged) throw ConfigError("generate_bundle: the nominal solution has not converged");
  if (nominal.problem != problem.kind) throw ConfigError("generate_bundle: nominal solved for a different problem");
  if (config.trajectories < 1 || config.samples < 2) throw ConfigError("generate_bundle: counts must be >= 1 and samples >= 2");
  if (config.max_retries < 0) throw ConfigError("generate_bundle: max_retries must be >= 0");
  if (config.max_refinements < 0) throw ConfigError("generate_bundle: max_refinements must be >= 0");
  if (!(config.hamiltonian_tolerance > 0.0)) throw ConfigError("generate_bundle: hamiltonian_tolerance must be > 0");

  ShootingOptions opt = options;
  opt.steps = sampling_steps(options.steps, config.samples);
  // Re-integrate the nominal on the sampling grid so it is a valid warm start here.
  ShootingSolution base = nominal;
  if (static_cast<int>(nominal.times.size()) != opt.steps + 1) {
    base = solve_from(problem, nominal.initial_state, nominal.unknowns, opt);
    if (!base.converged) throw NumericalError("generate_bundle: nominal does not re-converge on the sampling grid");
  }

  struct Slot {
    std::optional<ShootingSolution> solution;
    std::size_t attempts = 0;
    std::size_t converged = 0;
    bool rescued = false;
    bool refined = false;
  };
  std::vector<Slot> slots(config.trajectories);
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(config.trajectories); ++i) {
    Slot& slot = slots[static_cast<std::size_t>(i)];
    const std::uint64_t traj_seed = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
      Rng rng(derive_seed(traj_seed, static_cast<std::uint64_t>(attempt)));
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      Eigen::VectorXd x0 = base.initial_state;
      for (std::size_t c = 0; c < sd; ++c) x0[c] += unit(rng) * config.perturbation.half_width(c, x0[c]);
      ++slot.attempts;
      bool rescued = false;
      ShootingSolution sol;
      try {
        sol = warm_solve(problem, base, x0, opt, config.continuation_substeps, &rescued);
      } catch (const NumericalError&) {
        sol.converged = false;
      }
      int refinements = 0;
      while (sol.converged && max_abs_hamiltonian(sol) > config.hamiltonian_tolerance) {
        if (refinements == config.max_refinements) {
          sol.converged = false;
          break;
        }
        ++refinements;
        ShootingOptions finer = opt;
        finer.steps = opt.steps << refinements;
        try {
          sol = solve_from(problem, x0, sol.unknowns, finer);
        } catch (const NumericalError&) {
          sol.converged = false;
        }
      }
      if (sol.converged) {
        ++slot.converged;
        slot.rescued = rescued;
        slot.refined = refinements > 0;
        slot.solution = std::move(sol);
        break;
      }
    }
  }

  Bundle out;
  GenerationReport& rep = out.report;
  rep.requested = config.trajectories;
  out.dataset = data::TrajectoryDataset::empty_for(problem.kind, config.samples, base.unknowns.size() + 2);
  double residual_sum = 0.0;
  rep.min_tf = std::numeric_limits<double>::infinity();
  rep.max_tf = 0.0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Slot& slot = slots[i];
    rep.attempts += slot.attempts;
    rep.converged_attempts += slot.converged;
    rep.retries += slot.attempts - 1;
    if (!slot.solution) continue;
    const ShootingSolution& sol = *slot.solution;
    rep.continuation_rescues += slot.rescued ? 1 : 0;
    rep.refined += slot.refined ? 1 : 0;
    rep.max_residual = std::max(rep.max_residual, sol.residual_norm);
    residual_sum += sol.residual_norm;
    for (double h : sol.hamiltonian) rep.max_abs_hamiltonian = std::max(rep.max_abs_hamiltonian, std::abs(h));
    rep.min_tf = std::min(rep.min_tf, sol.tf);
    rep.max_tf = std::max(rep.max_tf, sol.tf);
    append_samples(out.dataset, i, sol, config.samples);
    ++rep.produced;
  }
  rep.mean_residual = rep.produced ? residual_sum / static_cast<double>(rep.produced) : 0.0;
  if (rep.produced == 0) rep.min_tf = 0.0;
  for (std::size_t k = 1; k < nominal.stage_final_mass.size(); ++k) {
    if (nominal.stage_final_mass[k] < nominal.stage_final_mass[k - 1] - 1e-9)
      rep.warnings.push_back(fmt::format("nominal final mass decreased from homotopy stage {} to {}: {:.10f} -> {:.10f}",
                                         k - 1, k, nominal.stage_final_mass[k - 1], nominal.stage_final_mass[k]));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rep.convergence_rate() < 0.5)
    throw NumericalError(fmt::format("bundle generation converged on only {:.1f}% of attempts\n{}",
                                     100.0 * rep.convergence_rate(), rep.to_text()));
  return out;
}

}  // namespace gcnet::ocp
