#include "gcnet/common/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gcnet/common/error.hpp"

namespace gcnet {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  if (w == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile_sorted(values, 0.5);
  s.p05 = quantile_sorted(values, 0.05);
  s.p95 = quantile_sorted(values, 0.95);
  s.min = values.front();
  s.max = values.back();
  return s;
}

}  // namespace gcnet
