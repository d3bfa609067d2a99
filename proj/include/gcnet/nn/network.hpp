#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gcnet/nn/activation.hpp"

namespace gcnet::nn {

struct NetworkSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_widths;
  std::size_t output_dim = 0;
  Activation hidden_activation;
  /// One head per output component, Sigmoid or Linear.
  std::vector<ActivationKind> output_heads;

  /// Throws ConfigError when a dimension is zero, a head is missing or an activation
  /// is used in the wrong position.
  void validate() const;

  /// Widths of every layer boundary, input first and output last.
  std::vector<std::size_t> layer_sizes() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Sum of fan_in * fan_out + fan_out over consecutive layer pairs.
/// An empty hidden list describes a single affine map.
std::size_t count_params(const NetworkSpec& spec);

struct Layer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;  // fan_out x fan_in, row-major
  std::vector<double> biases;   // fan_out
  /// Activation applied after the affine map; Linear for the output layer
  /// (heads are applied separately per component).
  Activation activation;

  double weight(std::size_t out, std::size_t in) const { return weights[out * fan_in + in]; }
  double& weight(std::size_t out, std::size_t in) { return weights[out * fan_in + in]; }
};

class Network {
 public:
  Network() = default;
  /// Allocates zero-filled tensors with the shapes implied by `spec`.
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  std::span<const Layer> layers() const { return layers_; }
  std::span<Layer> layers() { return layers_; }
  std::size_t input_dim() const { return spec_.input_dim; }
  std::size_t output_dim() const { return spec_.output_dim; }
  std::size_t parameter_count() const;

  /// Single-sample inference. Rejects wrong length and non-finite input.
  std::vector<double> forward(std::span<const double> input) const;

  /// Flat view over every parameter in layer order (weights then biases per layer).
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  /// FNV-1a over the raw parameter bytes. Used to assert read-only passes.
  std::uint64_t weight_hash() const;

  friend bool operator==(const Network&, const Network&);

 private:
  NetworkSpec spec_;
  std::vector<Layer> layers_;
};

bool operator==(const Network& a, const Network& b);

/// Applies the configured output heads in place.
void apply_heads(std::span<const ActivationKind> heads, std::span<double> values);

}  // namespace gcnet::nn
