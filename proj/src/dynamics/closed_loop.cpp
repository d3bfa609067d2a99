#include "gcnet/dynamics/closed_loop.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"
#include "gcnet/dynamics/rk4.hpp"

namespace gcnet::dyn {

namespace {

Eigen::Vector3d unit_direction(const Eigen::Vector3d& d) {
  const double n = d.norm();
  if (!(n > 0.0)) throw NumericalError("control policy returned a zero thrust direction");
  return d / n;
}

}  // namespace

Eigen::VectorXd ControlledSystem::sanitize(const Eigen::VectorXd& u) const {
  if (static_cast<std::size_t>(u.size()) != control_dim())
    throw ConfigError(fmt::format("control has {} components, expected {}", u.size(), control_dim()));
  if (!u.allFinite()) throw NumericalError("control policy returned a non-finite control");
  Eigen::VectorXd out(u.size());
  switch (kind) {
    case Problem::Drone:
      out = u.cwiseMax(0.0).cwiseMin(1.0);
      break;
    case Problem::Landing:
      out[0] = std::clamp(u[0], 0.0, 1.0);
      out.tail<3>() = unit_direction(u.tail<3>());
      break;
    case Problem::Transfer:
      out = unit_direction(u.head<3>());
      break;
  }
  return out;
}

Eigen::VectorXd ControlledSystem::derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  switch (kind) {
    case Problem::Drone:
      return drone_derivative(DroneState(x), DroneControl(u), drone);
    case Problem::Landing:
      return landing_derivative(LandingState(x), u[0], u.tail<3>(), landing);
    case Problem::Transfer:
      return transfer_derivative(TransferState(x), u.head<3>(), transfer);
  }
  throw ConfigError("unknown system");
}

ClosedLoopResult propagate_closed_loop(const ControlledSystem& system, const ControlPolicy& policy,
                                       const Eigen::VectorXd& x0, double tf, const ClosedLoopOptions& options) {
  if (static_cast<std::size_t>(x0.size()) != system.state_dim())
    throw ConfigError(fmt::format("initial state has {} components, expected {}", x0.size(), system.state_dim()));
  if (!(tf >= 0.0)) throw ConfigError("closed loop: tf must be >= 0");
  if (options.steps < 1) throw ConfigError("closed loop: steps must be >= 1");
  if (options.mode == FeedbackMode::ZeroOrderHold && options.update_rate < 0.0)
    throw ConfigError("closed loop: update rate must be >= 0");

  ClosedLoopResult out;
  auto query = [&](double t, const Eigen::VectorXd& x) { return system.sanitize(policy.control(t, x)); };
  out.times.push_back(0.0);
  out.states.push_back(x0);
  if (tf == 0.0) {
    out.controls.push_back(query(0.0, x0));
    return out;
  }

  std::vector<double> breaks = policy.breakpoints();
  std::sort(breaks.begin(), breaks.end());

  Eigen::VectorXd held;
  double next_update = 0.0;
  const double hold_period = options.update_rate > 0.0 ? 1.0 / options.update_rate : 0.0;

  auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (options.mode == FeedbackMode::Continuous) return system.derivative(x, query(t, x));
    return system.derivative(x, held);
  };

  Eigen::VectorXd x = x0;
  for (int k = 0; k < options.steps; ++k) {
    const double ta = tf * static_cast<double>(k) / options.steps;
    const double tb = k + 1 == options.steps ? tf : tf * static_cast<double>(k + 1) / options.steps;
    if (options.mode == FeedbackMode::ZeroOrderHold && (hold_period == 0.0 || ta >= next_update - 1e-12 * tf)) {
      held = query(ta, x);
      next_update = hold_period == 0.0 ? tb : next_update + hold_period;
    }
    out.controls.push_back(options.mode == FeedbackMode::Continuous ? query(ta, x) : held);
    double t = ta;
    auto it = std::upper_bound(breaks.begin(), breaks.end(), ta);
    for (; it != breaks.end() && *it < tb; ++it) {
      x = rk4_step(rhs, t, x, *it - t);
      t = *it;
    }
    x = rk4_step(rhs, t, x, tb - t);
    if (!x.allFinite()) throw NumericalError(fmt::format("closed loop: non-finite state at t = {:.17g}", tb));
    out.times.push_back(tb);
    out.states.push_back(x);
  }
  out.controls.push_back(options.mode == FeedbackMode::Continuous ? query(tf, x) : held);
  return out;
}

double drone_cost(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& controls, double eps) {
  if (times.size() != controls.size()) throw ConfigError("drone_cost: times and controls differ in length");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("drone_cost: eps must lie in [0, 1]");
  if (times.empty()) return 0.0;
  const double total = times.back() - times.front();
  double energy = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k)
    energy += 0.5 * (times[k] - times[k - 1]) * (controls[k].squaredNorm() + controls[k - 1].squaredNorm());
  return (1.0 - eps) * total + eps * energy;
}

}  // namespace gcnet::dyn
