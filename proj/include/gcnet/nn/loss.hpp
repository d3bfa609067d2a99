#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace gcnet::nn {

enum class LossKind : std::uint8_t {
  MSE = 0,
  /// 1 - cos(angle) between prediction and target; value in [0, 2].
  Cosine = 1,
  /// Squared error on component 0 plus the cosine term on components 1..3.
  ThrottleAndDirection = 2,
};

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view name);

/// Per-sample loss. Throws NumericalError for a zero-norm direction and ConfigError for
/// mismatched lengths.
double loss(LossKind kind, std::span<const double> prediction, std::span<const double> target);

/// Same value as `loss`, and writes d loss / d prediction into `grad`.
double loss_with_gradient(LossKind kind, std::span<const double> prediction,
                          std::span<const double> target, std::span<double> grad);

}  // namespace gcnet::nn
