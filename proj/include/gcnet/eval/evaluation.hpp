#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gcnet/common/stats.hpp"
#include "gcnet/data/dataset.hpp"
#include "gcnet/data/scaling.hpp"
#include "gcnet/dynamics/closed_loop.hpp"
#include "gcnet/nn/network.hpp"

namespace gcnet::eval {

struct EvalCase {
  std::uint64_t trajectory_id = 0;
  std::size_t slot = 0;  // trajectory slot inside the validation split
  Eigen::VectorXd initial_state;
  double tf = 0.0;
  /// Target position followed by target velocity.
  Eigen::Matrix<double, 6, 1> target;
};

/// Initial samples of `n` distinct validation trajectories, chosen by a seeded shuffle and
/// listed in split order. Without an explicit target (position, velocity) each case uses
/// the final stored sample of its trajectory.
std::vector<EvalCase> build_eval_cases(const data::TrajectoryDataset& validation, std::size_t n, std::uint64_t seed,
                                       const std::optional<Eigen::Matrix<double, 6, 1>>& target = std::nullopt);

/// Target (position, velocity) of the space problems; throws for the drone.
Eigen::Matrix<double, 6, 1> problem_target(const dyn::ControlledSystem& system,
                                           const Eigen::Vector3d& landing_position = {1.0, 0.0, 0.0});

/// Network in the loop: inputs scaled with the training scaler, heads applied.
class NetworkPolicy : public dyn::ControlPolicy {
 public:
  NetworkPolicy(const nn::Network& net, const data::ScalingTransform& scaler);
  Eigen::VectorXd control(double t, const Eigen::VectorXd& x) const override;

 private:
  const nn::Network& net_;
  const data::ScalingTransform& scaler_;
};

struct CaseResult {
  std::uint64_t trajectory_id = 0;
  double position_error = 0.0;  // infinite on failure
  double velocity_error = 0.0;
  bool failed = false;
  std::string message;
};

struct EvalReport {
  std::string label;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<CaseResult> cases;

  std::size_t failures() const;
  Summary position_summary() const;
  Summary velocity_summary() const;
};

using PolicyFactory = std::function<std::unique_ptr<dyn::ControlPolicy>(const EvalCase&)>;

/// Propagates every case in closed loop for its optimal time of flight. Cases run in
/// parallel; a failed propagation is recorded, not thrown.
EvalReport evaluate_policy(const PolicyFactory& make_policy, const dyn::ControlledSystem& system,
                           const std::vector<EvalCase>& cases, const dyn::ClosedLoopOptions& options = {});

EvalReport evaluate(const nn::Network& net, const data::ScalingTransform& scaler, const dyn::ControlledSystem& system,
                    const std::vector<EvalCase>& cases, const dyn::ClosedLoopOptions& options = {});

/// Writes errors.csv, position_errors.svg, velocity_errors.svg and summary.txt.
void emit_report(const std::vector<EvalReport>& reports, const std::filesystem::path& dir);

std::string errors_csv(const std::vector<EvalReport>& reports);
std::string summary_text(const std::vector<EvalReport>& reports);

}  // namespace gcnet::eval
