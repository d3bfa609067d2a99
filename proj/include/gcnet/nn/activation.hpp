#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace gcnet::nn {

enum class ActivationKind : std::uint8_t {
  ReLU = 0,
  Softplus = 1,
  Sine = 2,
  Sigmoid = 3,
  Linear = 4,
};

/// Hidden-layer nonlinearity. `omega0` is only meaningful for Sine layers, where the
/// pre-activation is omega0 * (W x) + b.
struct Activation {
  ActivationKind kind = ActivationKind::ReLU;
  double omega0 = 1.0;

  static Activation relu() { return {ActivationKind::ReLU, 1.0}; }
  static Activation softplus() { return {ActivationKind::Softplus, 1.0}; }
  static Activation sine(double omega0 = 30.0) { return {ActivationKind::Sine, omega0}; }

  /// Multiplier applied to W x before adding the bias.
  double input_scale() const { return kind == ActivationKind::Sine ? omega0 : 1.0; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

inline bool is_hidden_kind(ActivationKind k) {
  return k == ActivationKind::ReLU || k == ActivationKind::Softplus || k == ActivationKind::Sine;
}

inline bool is_head_kind(ActivationKind k) {
  return k == ActivationKind::Sigmoid || k == ActivationKind::Linear;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double softplus(double z) {
  // log(1 + e^z) without overflow for large |z|
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

/// Value of the nonlinearity at pre-activation z.
inline double activate(ActivationKind k, double z) {
  switch (k) {
    case ActivationKind::ReLU: return z > 0.0 ? z : 0.0;
    case ActivationKind::Softplus: return softplus(z);
    case ActivationKind::Sine: return std::sin(z);
    case ActivationKind::Sigmoid: return sigmoid(z);
    case ActivationKind::Linear: return z;
  }
  return z;
}

/// d activate / dz given the pre-activation z and the already computed output a.
inline double activate_derivative(ActivationKind k, double z, double a) {
  switch (k) {
    case ActivationKind::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Softplus: return sigmoid(z);
    case ActivationKind::Sine: return std::cos(z);
    case ActivationKind::Sigmoid: return a * (1.0 - a);
    case ActivationKind::Linear: return 1.0;
  }
  return 1.0;
}

std::string_view to_string(ActivationKind k);

/// Parses "relu", "softplus", "sine"/"siren", "sigmoid", "linear" (case-insensitive).
ActivationKind parse_activation_kind(std::string_view name);

}  // namespace gcnet::nn
