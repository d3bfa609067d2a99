#pragma once

#include <cstdint>

#include "gcnet/nn/network.hpp"

namespace gcnet::nn {

/// Sine-network initialization. First layer weights ~ U(-1/n, 1/n) with n the input
/// dimension; every later layer (output included) ~ U(-sqrt(6/m)/omega0, sqrt(6/m)/omega0)
/// with m that layer's fan-in. Biases are zero. Rejects non-sine networks.
void init_siren(Network& net, std::uint64_t seed);

/// Kaiming-normal initialization: weights ~ N(0, 2/fan_in), zero biases.
/// Rejects sine networks.
void init_kaiming(Network& net, std::uint64_t seed);

/// Dispatches on the hidden activation.
void init_for_activation(Network& net, std::uint64_t seed);

/// Bound of the uniform draw used by init_siren for a layer.
double siren_bound(std::size_t layer_index, std::size_t fan_in, double omega0);

}  // namespace gcnet::nn
