#include "gcnet/nn/activation.hpp"

#include <algorithm>
#include <cctype>

#include "gcnet/common/error.hpp"

namespace gcnet::nn {

std::string_view to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::Sine: return "sine";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Linear: return "linear";
  }
  return "unknown";
}

ActivationKind parse_activation_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "relu") return ActivationKind::ReLU;
  if (lower == "softplus") return ActivationKind::Softplus;
  if (lower == "sine" || lower == "siren" || lower == "sin") return ActivationKind::Sine;
  if (lower == "sigmoid") return ActivationKind::Sigmoid;
  if (lower == "linear" || lower == "identity") return ActivationKind::Linear;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

}  // namespace gcnet::nn
