#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gcnet/common/problem.hpp"
#include "gcnet/dynamics/drone.hpp"
#include "gcnet/dynamics/space.hpp"

namespace gcnet::dyn {

/// One of the three plants together with its admissible-control projection.
struct ControlledSystem {
  Problem kind = Problem::Transfer;
  DroneParams drone;
  LandingParams landing;
  TransferParams transfer;

  std::size_t state_dim() const { return gcnet::state_dim(kind); }
  std::size_t control_dim() const { return gcnet::control_dim(kind); }

  /// Clamps throttles to [0, 1] and normalizes thrust directions. Throws NumericalError
  /// for non-finite controls or a zero direction.
  Eigen::VectorXd sanitize(const Eigen::VectorXd& u) const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

class ControlPolicy {
 public:
  virtual ~ControlPolicy() = default;
  /// Raw control for state x at time t (sanitized by the caller).
  virtual Eigen::VectorXd control(double t, const Eigen::VectorXd& x) const = 0;
  /// Times at which the control is not smooth; integration steps are split there.
  virtual std::vector<double> breakpoints() const { return {}; }
};

enum class FeedbackMode {
  Continuous,     // policy queried at every RK4 stage
  ZeroOrderHold,  // policy queried at update instants and held in between
};

struct ClosedLoopOptions {
  /// Equal RK4 steps over [0, t_f].
  int steps = 1000;
  FeedbackMode mode = FeedbackMode::Continuous;
  /// Zero-order-hold update frequency in inverse time units; 0 updates once per step.
  double update_rate = 0.0;
};

struct ClosedLoopResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  /// Sanitized control applied at each node (the last entry is evaluated at t_f).
  std::vector<Eigen::VectorXd> controls;

  const Eigen::VectorXd& final_state() const { return states.back(); }
};

/// Propagates x' = f(x, policy(t, x)) from t = 0 to exactly tf.
ClosedLoopResult propagate_closed_loop(const ControlledSystem& system, const ControlPolicy& policy,
                                       const Eigen::VectorXd& x0, double tf, const ClosedLoopOptions& options = {});

/// Hybrid drone objective (1 - eps) T + eps * int |u|^2 dt, the integral by the
/// trapezoidal rule over the control samples.
double drone_cost(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& controls, double eps);

}  // namespace gcnet::dyn
