#include "gcnet/data/scaling.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace gcnet::data {

void ScalingTransform::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < min.size(); ++i) out[i] = scale_component(i, x[i]);
}

std::vector<double> ScalingTransform::apply(std::span<const double> x) const {
  if (x.size() != dim()) throw ConfigError("scaler: input width mismatch");
  std::vector<double> out(x.size());
  apply(x, out);
  return out;
}

std::vector<double> ScalingTransform::invert(std::span<const double> s) const {
  if (s.size() != dim()) throw ConfigError("scaler: input width mismatch");
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = unscale_component(i, s[i]);
  return out;
}

ScalingTransform fit_scaler(const TrajectoryDataset& train) {
  if (train.record_count() == 0) throw ConfigError("fit_scaler: empty split");
  ScalingTransform t;
  t.min.assign(train.state_dim, std::numeric_limits<double>::infinity());
  t.max.assign(train.state_dim, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < train.record_count(); ++r) {
    const auto s = train.state(r);
    for (std::size_t i = 0; i < s.size(); ++i) {
      t.min[i] = std::min(t.min[i], s[i]);
      t.max[i] = std::max(t.max[i], s[i]);
    }
  }
  for (std::size_t i = 0; i < t.dim(); ++i)
    if (!(t.max[i] > t.min[i]))
      throw ConfigError(fmt::format("fit_scaler: input component {} is constant ({}) over the training split", i,
                                    t.min[i]));
  return t;
}

void save_scaler(const std::filesystem::path& path, const ScalingTransform& t) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "GCSCALE 1\n" << t.dim() << "\n";
  for (std::size_t i = 0; i < t.dim(); ++i) out << fmt::format("{:.17g} {:.17g}\n", t.min[i], t.max[i]);
  if (!out) throw IoError("failed writing " + path.string());
}

ScalingTransform load_scaler(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scaler file " + path.string());
  std::string magic;
  int version = 0;
  std::size_t dim = 0;
  if (!(in >> magic >> version >> dim) || magic != "GCSCALE" || version != 1)
    throw IoError("bad scaler file header in " + path.string());
  ScalingTransform t;
  t.min.resize(dim);
  t.max.resize(dim);
  for (std::size_t i = 0; i < dim; ++i)
    if (!(in >> t.min[i] >> t.max[i])) throw IoError(fmt::format("scaler file {} truncated at entry {}", path.string(), i));
  for (std::size_t i = 0; i < dim; ++i)
    if (!(t.max[i] > t.min[i])) throw IoError(fmt::format("scaler file {}: component {} has max <= min", path.string(), i));
  return t;
}

}  // namespace gcnet::data
