#include "gcnet/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcnet/common/rng.hpp"
#include "gcnet/data/scaling.hpp"

namespace gcnet::data {

std::size_t train_trajectory_count(std::size_t total, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
  if (total < 2) throw ConfigError("split needs at least two trajectories");
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  return std::clamp<std::size_t>(n, 1, total - 1);
}

Split split(const TrajectoryDataset& ds, const SplitSpec& spec) {
  const std::size_t total = ds.trajectory_count();
  const std::size_t n_train = train_trajectory_count(total, spec.train_fraction);
  std::vector<std::size_t> slots(total);
  std::iota(slots.begin(), slots.end(), 0);
  Rng rng(spec.seed);
  std::shuffle(slots.begin(), slots.end(), rng);
  std::vector<std::size_t> train(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val(slots.begin() + static_cast<std::ptrdiff_t>(n_train), slots.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {ds.select_trajectories(train), ds.select_trajectories(val)};
}

BatchIterator::BatchIterator(const TrajectoryDataset& ds, const ScalingTransform& scaler, std::size_t batch_size,
                             std::uint64_t epoch_seed)
    : ds_(ds), scaler_(scaler), batch_size_(batch_size), order_(ds.record_count()) {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (scaler.dim() != ds.state_dim) throw ConfigError("scaler width does not match dataset");
  std::iota(order_.begin(), order_.end(), 0);
  Rng rng(epoch_seed);
  std::shuffle(order_.begin(), order_.end(), rng);
}

bool BatchIterator::next(Batch& out) {
  if (cursor_ >= order_.size()) return false;
  const std::size_t n = std::min(batch_size_, order_.size() - cursor_);
  out.inputs.resize(n, ds_.state_dim);
  out.targets.resize(n, ds_.control_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = order_[cursor_ + i];
    scaler_.apply(ds_.state(r), out.inputs.row_span(i));
    const auto u = ds_.control(r);
    std::copy(u.begin(), u.end(), out.targets.row(i));
  }
  cursor_ += n;
  return true;
}

Batch full_batch(const TrajectoryDataset& ds, const ScalingTransform& scaler) {
  Batch b;
  b.inputs.resize(ds.record_count(), ds.state_dim);
  b.targets.resize(ds.record_count(), ds.control_dim);
  for (std::size_t r = 0; r < ds.record_count(); ++r) {
    scaler.apply(ds.state(r), b.inputs.row_span(r));
    const auto u = ds.control(r);
    std::copy(u.begin(), u.end(), b.targets.row(r));
  }
  return b;
}

}  // namespace gcnet::data
