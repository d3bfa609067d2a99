#pragma once

#include <cstdint>
#include <utility>

#include "gcnet/data/dataset.hpp"
#include "gcnet/data/scaling.hpp"
#include "gcnet/nn/kernels.hpp"

namespace gcnet::data {

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct Split {
  TrajectoryDataset train;
  TrajectoryDataset validation;
};

/// Assigns whole trajectories to the training or validation side by a seeded shuffle.
/// Trajectories keep their original relative order within each side.
Split split(const TrajectoryDataset& ds, const SplitSpec& spec);

/// Number of trajectories assigned to the training side.
std::size_t train_trajectory_count(std::size_t total, double fraction);

struct Batch {
  nn::Matrix inputs;   // scaled states
  nn::Matrix targets;  // raw controls
};

/// Seeded per-epoch shuffle over every sample of a split; the last batch may be short.
class BatchIterator {
 public:
  BatchIterator(const TrajectoryDataset& ds, const ScalingTransform& scaler, std::size_t batch_size,
                std::uint64_t epoch_seed);

  std::size_t batch_count() const { return (order_.size() + batch_size_ - 1) / batch_size_; }
  /// Fills `out` with the next batch; returns false once the epoch is exhausted.
  bool next(Batch& out);
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  const TrajectoryDataset& ds_;
  const ScalingTransform& scaler_;
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// Whole split as one scaled batch in record order (validation passes, evaluation).
Batch full_batch(const TrajectoryDataset& ds, const ScalingTransform& scaler);

}  // namespace gcnet::data
