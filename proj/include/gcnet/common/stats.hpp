#pragma once

#include <vector>

namespace gcnet {

/// Linear-interpolation quantile (the common "type 7" definition) of an ascending range.
double quantile_sorted(const std::vector<double>& sorted, double p);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Statistics over the given values; infinities propagate into mean and the upper quantiles.
Summary summarize(std::vector<double> values);

}  // namespace gcnet
