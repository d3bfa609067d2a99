#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gcnet/data/dataset.hpp"

namespace gcnet::data {

/// Per-input affine map sending the training minimum to -1 and the maximum to +1.
struct ScalingTransform {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dim() const { return min.size(); }
  double scale_component(std::size_t i, double x) const { return (x - min[i]) / (max[i] - min[i]) * 2.0 - 1.0; }
  double unscale_component(std::size_t i, double s) const { return min[i] + (s + 1.0) * 0.5 * (max[i] - min[i]); }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> invert(std::span<const double> scaled) const;

  friend bool operator==(const ScalingTransform&, const ScalingTransform&) = default;
};

/// Min/max over every state of the (training) split. Throws ConfigError naming the
/// component when max == min.
ScalingTransform fit_scaler(const TrajectoryDataset& train);

/// Text file: "GCSCALE 1", the dimension, then one "min max" pair per line.
void save_scaler(const std::filesystem::path& path, const ScalingTransform& t);
ScalingTransform load_scaler(const std::filesystem::path& path);

}  // namespace gcnet::data
