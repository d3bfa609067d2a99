#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gcnet/data/dataset.hpp"
#include "gcnet/dynamics/closed_loop.hpp"
#include "gcnet/ocp/bundle.hpp"

namespace gcnet::ocp {

/// Open-loop replay of an extremal: the control at time t comes from the state-costate
/// trajectory re-integrated from the stored unknowns, so it is exact to integration
/// accuracy at any t, not only on the sampling grid.
class ExtremalPlayback : public dyn::ControlPolicy {
 public:
  ExtremalPlayback(const SpaceProblem& problem, const Eigen::VectorXd& x0, const Eigen::VectorXd& unknowns,
                   double eps, int steps);
  /// Rebuilds trajectory `traj` of a generated dataset from its auxiliary block. With
  /// steps = 0 the extremal is integrated on the grid it was solved on.
  static ExtremalPlayback from_dataset(const SpaceProblem& problem, const data::TrajectoryDataset& ds,
                                       std::size_t traj, int steps = 0);

  Eigen::VectorXd control(double t, const Eigen::VectorXd& x) const override;
  std::vector<double> breakpoints() const override { return crossings_; }

  double final_time() const { return tf_; }
  const Eigen::VectorXd& initial_state() const { return x0_; }
  /// State at t_f of the underlying extremal.
  Eigen::VectorXd final_state() const;

 private:
  SpaceProblem problem_;
  Eigen::VectorXd x0_;
  double eps_ = 0.0;
  double tf_ = 0.0;
  double h_ = 0.0;
  std::vector<Eigen::VectorXd> nodes_;  // augmented state-costate vectors
  std::vector<double> crossings_;
};

/// Piecewise-linear interpolation of the stored control samples of one trajectory.
class SampledPlayback : public dyn::ControlPolicy {
 public:
  SampledPlayback(const data::TrajectoryDataset& ds, std::size_t traj);
  Eigen::VectorXd control(double t, const Eigen::VectorXd& x) const override;

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> controls_;
};

}  // namespace gcnet::ocp
