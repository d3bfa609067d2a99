#include "gcnet/eval/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"
#include "gcnet/common/svg.hpp"

namespace gcnet::eval {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

Eigen::VectorXd to_vector(std::span<const double> s) {
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace

std::vector<EvalCase> build_eval_cases(const data::TrajectoryDataset& validation, std::size_t n, std::uint64_t seed,
                                       const std::optional<Eigen::Matrix<double, 6, 1>>& target) {
  const std::size_t total = validation.trajectory_count();
  if (n == 0) throw ConfigError("at least one evaluation case is required");
  if (n > total)
    throw ConfigError(fmt::format("validation split has {} trajectories, {} evaluation cases requested", total, n));
  if (validation.state_dim < 6) throw ConfigError("evaluation needs position and velocity states");
  std::vector<std::size_t> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  Rng rng(seed);
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(n);
  std::sort(slots.begin(), slots.end());

  std::vector<EvalCase> cases;
  for (std::size_t slot : slots) {
    const std::size_t first = validation.first_record(slot);
    EvalCase c;
    c.slot = slot;
    c.trajectory_id = validation.trajectory_ids[first];
    c.initial_state = to_vector(validation.state(first));
    c.tf = validation.final_times[first];
    if (!(c.tf > 0.0)) throw ConfigError(fmt::format("trajectory {} has t_f <= 0", c.trajectory_id));
    if (target) {
      c.target = *target;
    } else {
      const auto last = validation.state(first + validation.samples_per_trajectory - 1);
      for (int i = 0; i < 6; ++i) c.target[i] = last[static_cast<std::size_t>(i)];
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

Eigen::Matrix<double, 6, 1> problem_target(const dyn::ControlledSystem& system, const Eigen::Vector3d& landing_position) {
  Eigen::Matrix<double, 6, 1> t = Eigen::Matrix<double, 6, 1>::Zero();
  switch (system.kind) {
    case Problem::Transfer:
      t = system.transfer.target_state();
      break;
    case Problem::Landing:
      t.head<3>() = landing_position;
      break;
    case Problem::Drone:
      throw ConfigError("the drone problem has no fixed target state");
  }
  return t;
}

NetworkPolicy::NetworkPolicy(const nn::Network& net, const data::ScalingTransform& scaler) : net_(net), scaler_(scaler) {
  if (scaler.dim() != net.input_dim()) throw ConfigError("scaler width does not match the network input");
}

Eigen::VectorXd NetworkPolicy::control(double, const Eigen::VectorXd& x) const {
  std::vector<double> scaled(static_cast<std::size_t>(x.size()));
  scaler_.apply(std::span<const double>(x.data(), scaled.size()), scaled);
  const std::vector<double> out = net_.forward(scaled);
  return to_vector(out);
}

std::size_t EvalReport::failures() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return c.failed; }));
}

Summary EvalReport::position_summary() const {
  std::vector<double> v;
  for (const auto& c : cases) v.push_back(c.position_error);
  return summarize(std::move(v));
}

Summary EvalReport::velocity_summary() const {
  std::vector<double> v;
  for (const auto& c : cases) v.push_back(c.velocity_error);
  return summarize(std::move(v));
}

EvalReport evaluate_policy(const PolicyFactory& make_policy, const dyn::ControlledSystem& system,
                           const std::vector<EvalCase>& cases, const dyn::ClosedLoopOptions& options) {
  EvalReport report;
  report.cases.resize(cases.size());
  const auto count = static_cast<std::ptrdiff_t>(cases.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const EvalCase& c = cases[static_cast<std::size_t>(i)];
    CaseResult& r = report.cases[static_cast<std::size_t>(i)];
    r.trajectory_id = c.trajectory_id;
    try {
      const auto policy = make_policy(c);
      const auto traj = dyn::propagate_closed_loop(system, *policy, c.initial_state, c.tf, options);
      const Eigen::VectorXd& xf = traj.final_state();
      r.position_error = (xf.head<3>() - c.target.head<3>()).norm();
      r.velocity_error = (xf.segment<3>(3) - c.target.tail<3>()).norm();
      if (!std::isfinite(r.position_error) || !std::isfinite(r.velocity_error)) throw NumericalError("non-finite error");
    } catch (const NumericalError& e) {
      r.failed = true;
      r.message = e.what();
      r.position_error = std::numeric_limits<double>::infinity();
      r.velocity_error = std::numeric_limits<double>::infinity();
    }
  }
  return report;
}

EvalReport evaluate(const nn::Network& net, const data::ScalingTransform& scaler, const dyn::ControlledSystem& system,
                    const std::vector<EvalCase>& cases, const dyn::ClosedLoopOptions& options) {
  if (net.input_dim() != system.state_dim() || net.output_dim() != system.control_dim())
    throw ConfigError(fmt::format("network {}->{} does not match the '{}' system", net.input_dim(), net.output_dim(),
                                  to_string(system.kind)));
  const NetworkPolicy policy(net, scaler);
  struct Shared : dyn::ControlPolicy {
    const NetworkPolicy& inner;
    explicit Shared(const NetworkPolicy& p) : inner(p) {}
    Eigen::VectorXd control(double t, const Eigen::VectorXd& x) const override { return inner.control(t, x); }
  };
  return evaluate_policy([&](const EvalCase&) { return std::make_unique<Shared>(policy); }, system, cases, options);
}

std::string errors_csv(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ConfigError("no evaluation reports to write");
  const std::size_t n = reports.front().cases.size();
  for (const auto& r : reports)
    if (r.cases.size() != n) throw ConfigError("evaluation reports cover different case counts");
  std::string out = "case,trajectory";
  for (const auto& r : reports) out += fmt::format(",{0}_position_error,{0}_velocity_error", r.label);
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += fmt::format("{},{}", i, reports.front().cases[i].trajectory_id);
    for (const auto& r : reports)
      out += fmt::format(",{:.17g},{:.17g}", r.cases[i].position_error, r.cases[i].velocity_error);
    out += "\n";
  }
  return out;
}

std::string summary_text(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw ConfigError("no evaluation reports to summarize");
  std::string out = "closed-loop final errors (normalized units)\n";
  for (const auto& r : reports) {
    out += fmt::format("\n[{}]\n", r.label);
    for (const auto& [k, v] : r.metadata) out += fmt::format("  {} = {}\n", k, v);
    out += fmt::format("  cases = {}, failures = {}\n", r.cases.size(), r.failures());
    const Summary p = r.position_summary(), v = r.velocity_summary();
    out += fmt::format("  position: mean {:.6e}  median {:.6e}  p05 {:.6e}  p95 {:.6e}\n", p.mean, p.median, p.p05, p.p95);
    out += fmt::format("  velocity: mean {:.6e}  median {:.6e}  p05 {:.6e}  p95 {:.6e}\n", v.mean, v.median, v.p05, v.p95);
    for (const auto& c : r.cases)
      if (c.failed) out += fmt::format("  failed trajectory {}: {}\n", c.trajectory_id, c.message);
  }
  auto best = [&](auto metric) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < reports.size(); ++i)
      if (metric(reports[i]) < metric(reports[b])) b = i;
    return reports[b].label;
  };
  out += fmt::format("\nbest mean position error: {}\n", best([](const EvalReport& r) { return r.position_summary().mean; }));
  out += fmt::format("best mean velocity error: {}\n", best([](const EvalReport& r) { return r.velocity_summary().mean; }));
  return out;
}

void emit_report(const std::vector<EvalReport>& reports, const std::filesystem::path& dir) {
  const std::string csv = errors_csv(reports);
  std::filesystem::create_directories(dir);
  write_text(dir / "errors.csv", csv);
  std::vector<svg::Box> pos, vel;
  for (const auto& r : reports) {
    svg::Box bp{r.label, {}}, bv{r.label, {}};
    for (const auto& c : r.cases) {
      bp.values.push_back(c.position_error);
      bv.values.push_back(c.velocity_error);
    }
    pos.push_back(std::move(bp));
    vel.push_back(std::move(bv));
  }
  write_text(dir / "position_errors.svg", svg::box_plot("Final position error", "|r(tf) - r_t|", pos, true));
  write_text(dir / "velocity_errors.svg", svg::box_plot("Final velocity error", "|v(tf) - v_t|", vel, true));
  write_text(dir / "summary.txt", summary_text(reports));
}

}  // namespace gcnet::eval
