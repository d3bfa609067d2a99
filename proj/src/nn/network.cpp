#include "gcnet/nn/network.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "gcnet/common/error.hpp"

namespace gcnet::nn {

void NetworkSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ConfigError("network dimensions must be >= 1");
  for (std::size_t w : hidden_widths)
    if (w == 0) throw ConfigError("hidden widths must be >= 1");
  if (!hidden_widths.empty()) {
    if (!is_hidden_kind(hidden_activation.kind))
      throw ConfigError("hidden activation must be relu, softplus or sine, got " +
                        std::string(to_string(hidden_activation.kind)));
    if (hidden_activation.kind == ActivationKind::Sine &&
        !(hidden_activation.omega0 > 0.0 && std::isfinite(hidden_activation.omega0)))
      throw ConfigError("sine activation needs a strictly positive omega0");
  }
  if (output_heads.size() != output_dim)
    throw ConfigError("output_heads must name one head per output (" +
                      std::to_string(output_dim) + "), got " + std::to_string(output_heads.size()));
  for (ActivationKind h : output_heads)
    if (!is_head_kind(h)) throw ConfigError("output heads must be sigmoid or linear");
}

std::vector<std::size_t> NetworkSpec::layer_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(hidden_widths.size() + 2);
  sizes.push_back(input_dim);
  sizes.insert(sizes.end(), hidden_widths.begin(), hidden_widths.end());
  sizes.push_back(output_dim);
  return sizes;
}

std::size_t count_params(const NetworkSpec& spec) {
  const auto sizes = spec.layer_sizes();
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) total += sizes[i] * sizes[i + 1] + sizes[i + 1];
  return total;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto sizes = spec_.layer_sizes();
  layers_.resize(sizes.size() - 1);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Layer& l = layers_[i];
    l.fan_in = sizes[i];
    l.fan_out = sizes[i + 1];
    l.weights.assign(l.fan_in * l.fan_out, 0.0);
    l.biases.assign(l.fan_out, 0.0);
    const bool is_output = i + 1 == layers_.size();
    l.activation = is_output ? Activation{ActivationKind::Linear, 1.0} : spec_.hidden_activation;
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

void apply_heads(std::span<const ActivationKind> heads, std::span<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = activate(heads[i], values[i]);
}

std::vector<double> Network::forward(std::span<const double> input) const {
  if (input.size() != spec_.input_dim)
    throw ConfigError("forward: expected " + std::to_string(spec_.input_dim) + " inputs, got " +
                      std::to_string(input.size()));
  for (double x : input)
    if (!std::isfinite(x)) throw NumericalError("forward: non-finite input");

  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (const Layer& l : layers_) {
    next.assign(l.fan_out, 0.0);
    const double scale = l.activation.input_scale();
    for (std::size_t o = 0; o < l.fan_out; ++o) {
      const double* w = &l.weights[o * l.fan_in];
      double acc = 0.0;
      for (std::size_t k = 0; k < l.fan_in; ++k) acc += w[k] * current[k];
      next[o] = activate(l.activation.kind, scale * acc + l.biases[o]);
    }
    current.swap(next);
  }
  apply_heads(spec_.output_heads, current);
  return current;
}

std::vector<double> Network::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.biases.begin(), l.biases.end());
  }
  return flat;
}

void Network::unflatten(std::span<const double> params) {
  if (params.size() != parameter_count()) throw ConfigError("unflatten: parameter count mismatch");
  std::size_t pos = 0;
  for (Layer& l : layers_) {
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.begin());
    pos += l.weights.size();
    std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(pos), l.biases.size(), l.biases.begin());
    pos += l.biases.size();
  }
}

std::uint64_t Network::weight_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<double>& v) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const Layer& l : layers_) {
    mix(l.weights);
    mix(l.biases);
  }
  return h;
}

bool operator==(const Network& a, const Network& b) {
  if (!(a.spec_ == b.spec_)) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    const Layer& x = a.layers_[i];
    const Layer& y = b.layers_[i];
    if (std::memcmp(x.weights.data(), y.weights.data(), x.weights.size() * sizeof(double)) != 0 ||
        std::memcmp(x.biases.data(), y.biases.data(), x.biases.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

}  // namespace gcnet::nn
