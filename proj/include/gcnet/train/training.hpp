#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gcnet/data/dataset.hpp"
#include "gcnet/data/scaling.hpp"
#include "gcnet/data/split.hpp"
#include "gcnet/nn/loss.hpp"
#include "gcnet/nn/network.hpp"

namespace gcnet::train {

enum class MonitoredLoss { Training, Validation };

struct TrainConfig {
  double learning_rate = 5e-5;
  std::size_t batch_size = 1024;
  std::size_t epochs = 50;
  double scheduler_factor = 0.9;
  int scheduler_patience = 10;
  double scheduler_threshold = 0.0;
  MonitoredLoss scheduler_monitor = MonitoredLoss::Training;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Output heads per problem: drone sigmoid on all four, landing sigmoid on the
/// throttle and linear direction, transfer linear direction.
std::vector<nn::ActivationKind> output_heads_for(Problem p);
nn::LossKind loss_for(Problem p);
nn::NetworkSpec network_spec_for(Problem p, std::vector<std::size_t> hidden_widths, nn::Activation hidden);

struct ExperimentConfig {
  Problem problem = Problem::Transfer;
  nn::NetworkSpec network;
  nn::LossKind loss = nn::LossKind::Cosine;
  TrainConfig train;
  data::SplitSpec split;
  std::string label;

  /// Checks that network shape, heads and loss agree with the problem.
  void validate() const;
};

struct LossCurve {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> learning_rate;

  std::size_t epochs() const { return train_loss.size(); }
  /// Columns epoch,train_loss,val_loss,lr with 17 significant digits.
  std::string to_csv() const;
};

struct TrainResult {
  nn::Network final_network;
  nn::Network best_network;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_loss = 0.0;
  LossCurve curve;
  data::ScalingTransform scaler;
};

/// Called after every epoch with (epoch 1-based, train loss, val loss, lr used).
using EpochCallback = std::function<void(std::size_t, double, double, double)>;

/// Behavioural-cloning training on an existing split. The scaler is fitted on the
/// training side. Deterministic for a given configuration and independent of the
/// thread count. Throws NumericalError naming the epoch and batch on a non-finite loss.
TrainResult train(const ExperimentConfig& config, const data::Split& split, const EpochCallback& on_epoch = {});

/// Mean loss over a whole split, evaluated in fixed-size chunks.
double dataset_loss(const nn::Network& net, const data::TrajectoryDataset& ds, const data::ScalingTransform& scaler,
                    nn::LossKind kind);

/// Writes checkpoint_final.gcnet, checkpoint_best.gcnet, their text exports,
/// loss_curve.csv and scaler.txt into `dir`.
void write_training_outputs(const std::filesystem::path& dir, const TrainResult& result);

struct ComparisonEntry {
  std::string label;
  TrainResult result;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;

  /// epoch followed by train/val/lr columns per entry.
  std::string to_csv() const;
  std::string to_svg(const std::string& title) const;
  /// Final-loss ranking and the number of epochs each entry had the lowest training loss.
  std::string summary() const;
};

/// Trains one network per hidden activation with identical data, split, seed and schedule.
ComparisonReport compare_activations(const ExperimentConfig& base, const std::vector<nn::Activation>& activations,
                                     const data::Split& split,
                                     const std::function<void(const std::string&, std::size_t, double, double, double)>&
                                         on_epoch = {});

}  // namespace gcnet::train
