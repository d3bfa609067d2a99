#include "gcnet/ocp/playback.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "gcnet/common/error.hpp"
#include "gcnet/dynamics/rk4.hpp"
#include "gcnet/ocp/pmp.hpp"

namespace gcnet::ocp {

namespace {

Eigen::VectorXd augmented_start(const Eigen::VectorXd& x0, const Eigen::VectorXd& z) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd y(2 * n);
  y.head(n) = x0;
  y.tail(n) = z.head(n);
  return y;
}

}  // namespace

ExtremalPlayback::ExtremalPlayback(const SpaceProblem& problem, const Eigen::VectorXd& x0,
                                   const Eigen::VectorXd& unknowns, double eps, int steps)
    : problem_(problem), x0_(x0), eps_(eps) {
  const Eigen::Index n = static_cast<Eigen::Index>(state_dim(problem.kind));
  if (problem.kind == Problem::Drone) throw ConfigError("extremal playback needs a space problem");
  if (x0.size() != n || unknowns.size() != n + 1)
    throw ConfigError(fmt::format("extremal playback: expected {} states and {} unknowns", n, n + 1));
  if (steps < 1) throw ConfigError("extremal playback: steps must be >= 1");
  tf_ = unknowns[n];
  h_ = tf_ / steps;
  const Eigen::VectorXd y0 = augmented_start(x0, unknowns);
  auto keep = [&](int, double, const auto& y) { nodes_.emplace_back(y); };
  if (problem.kind == Problem::Transfer) {
    auto rhs = [&](double, const Vector12d& y) { return transfer_augmented_derivative(y, problem_.transfer.params); };
    dyn::rk4_uniform(rhs, Vector12d(y0), 0.0, tf_, steps, keep);
  } else {
    const auto& params = problem_.landing.params;
    auto rhs = [&](double, const Vector14d& y) { return landing_augmented_derivative(y, eps_, params); };
    auto guards = [&](const Vector14d& y) {
      const double sf = landing_switching_function(y, params);
      return std::array<double, 2>{sf - eps_, sf + eps_};
    };
    dyn::rk4_uniform_guarded(rhs, guards, Vector14d(y0), 0.0, tf_, steps, keep, &crossings_);
  }
}

ExtremalPlayback ExtremalPlayback::from_dataset(const SpaceProblem& problem, const data::TrajectoryDataset& ds,
                                                std::size_t traj, int steps) {
  if (ds.problem != problem.kind) throw ConfigError("extremal playback: dataset is for another problem");
  if (traj >= ds.trajectory_count()) throw ConfigError("extremal playback: trajectory index out of range");
  const std::size_t n = ds.state_dim;
  if (ds.aux_dim != n + 3)
    throw ConfigError("extremal playback: dataset carries no shooting unknowns (not a generated bundle)");
  const auto aux = ds.trajectory_aux(traj);
  if (steps == 0) steps = static_cast<int>(aux[n + 2]);
  const Eigen::VectorXd z = Eigen::Map<const Eigen::VectorXd>(aux.data(), static_cast<Eigen::Index>(n + 1));
  const auto s0 = ds.state(ds.first_record(traj));
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(s0.data(), static_cast<Eigen::Index>(n));
  return ExtremalPlayback(problem, x0, z, aux[n + 1], steps);
}

Eigen::VectorXd ExtremalPlayback::control(double t, const Eigen::VectorXd&) const {
  const double tc = std::clamp(t, 0.0, tf_);
  const auto last = static_cast<std::ptrdiff_t>(nodes_.size()) - 1;
  std::ptrdiff_t k = h_ > 0.0 ? static_cast<std::ptrdiff_t>(std::floor(tc / h_)) : 0;
  k = std::clamp<std::ptrdiff_t>(k, 0, last);
  const double tk = static_cast<double>(k) * h_;
  if (problem_.kind == Problem::Transfer) {
    Vector12d y = nodes_[static_cast<std::size_t>(k)];
    if (tc > tk) {
      auto rhs = [&](double, const Vector12d& v) { return transfer_augmented_derivative(v, problem_.transfer.params); };
      y = dyn::rk4_step(rhs, tk, y, tc - tk);
    }
    return primer_direction(y.segment<3>(9));
  }
  const auto& params = problem_.landing.params;
  Vector14d y = nodes_[static_cast<std::size_t>(k)];
  if (tc > tk) {
    auto rhs = [&](double, const Vector14d& v) { return landing_augmented_derivative(v, eps_, params); };
    auto guards = [&](const Vector14d& v) {
      const double sf = landing_switching_function(v, params);
      return std::array<double, 2>{sf - eps_, sf + eps_};
    };
    y = dyn::rk4_uniform_guarded(rhs, guards, y, tk, tc, 1, [](int, double, const Vector14d&) {});
  }
  Eigen::VectorXd u(4);
  u[0] = landing_throttle(landing_switching_function(y, params), eps_);
  u.tail<3>() = primer_direction(y.segment<3>(10));
  return u;
}

Eigen::VectorXd ExtremalPlayback::final_state() const {
  return nodes_.back().head(x0_.size());
}

SampledPlayback::SampledPlayback(const data::TrajectoryDataset& ds, std::size_t traj) {
  if (traj >= ds.trajectory_count()) throw ConfigError("sampled playback: trajectory index out of range");
  for (std::size_t k = 0; k < ds.samples_per_trajectory; ++k) {
    const std::size_t r = ds.first_record(traj) + k;
    times_.push_back(ds.times[r]);
    const auto c = ds.control(r);
    controls_.emplace_back(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  }
}

Eigen::VectorXd SampledPlayback::control(double t, const Eigen::VectorXd&) const {
  if (t <= times_.front()) return controls_.front();
  if (t >= times_.back()) return controls_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t b = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[b - 1]) / (times_[b] - times_[b - 1]);
  return (1.0 - w) * controls_[b - 1] + w * controls_[b];
}

}  // namespace gcnet::ocp
