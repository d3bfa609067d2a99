#include "gcnet/nn/init.hpp"

#include <cmath>
#include <random>

#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"

namespace gcnet::nn {

double siren_bound(std::size_t layer_index, std::size_t fan_in, double omega0) {
  const auto n = static_cast<double>(fan_in);
  return layer_index == 0 ? 1.0 / n : std::sqrt(6.0 / n) / omega0;
}

void init_siren(Network& net, std::uint64_t seed) {
  const Activation act = net.spec().hidden_activation;
  if (act.kind != ActivationKind::Sine || net.spec().hidden_widths.empty())
    throw ConfigError("init_siren requires a sine network");
  Rng rng(seed);
  auto layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Layer& l = layers[i];
    const double bound = siren_bound(i, l.fan_in, act.omega0);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : l.weights) w = dist(rng);
    std::fill(l.biases.begin(), l.biases.end(), 0.0);
  }
}

void init_kaiming(Network& net, std::uint64_t seed) {
  if (net.spec().hidden_activation.kind == ActivationKind::Sine && !net.spec().hidden_widths.empty())
    throw ConfigError("init_kaiming is not defined for sine networks");
  Rng rng(seed);
  for (Layer& l : net.layers()) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(l.fan_in)));
    for (double& w : l.weights) w = dist(rng);
    std::fill(l.biases.begin(), l.biases.end(), 0.0);
  }
}

void init_for_activation(Network& net, std::uint64_t seed) {
  if (net.spec().hidden_activation.kind == ActivationKind::Sine)
    init_siren(net, seed);
  else
    init_kaiming(net, seed);
}

}  // namespace gcnet::nn
