#include "gcnet/nn/loss.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "gcnet/common/error.hpp"

namespace gcnet::nn {

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::MSE: return "mse";
    case LossKind::Cosine: return "cosine";
    case LossKind::ThrottleAndDirection: return "throttle_direction";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mse") return LossKind::MSE;
  if (lower == "cosine") return LossKind::Cosine;
  if (lower == "throttle_direction" || lower == "throttleanddirection") return LossKind::ThrottleAndDirection;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

namespace {

double mse(std::span<const double> p, std::span<const double> t, std::span<double> grad) {
  const auto n = static_cast<double>(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] - t[i];
    acc += e * e;
    if (!grad.empty()) grad[i] = 2.0 * e / n;
  }
  return acc / n;
}

double cosine(std::span<const double> p, std::span<const double> t, std::span<double> grad) {
  double pp = 0.0, tt = 0.0, pt = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    pp += p[i] * p[i];
    tt += t[i] * t[i];
    pt += p[i] * t[i];
  }
  if (pp == 0.0 || tt == 0.0) throw NumericalError("cosine loss: zero-norm direction vector");
  const double np = std::sqrt(pp);
  const double nt = std::sqrt(tt);
  const double c = pt / (np * nt);
  if (!grad.empty()) {
    // d(1 - c)/dp = -(t / (|p||t|) - c p / |p|^2)
    for (std::size_t i = 0; i < p.size(); ++i) grad[i] = -(t[i] / (np * nt) - c * p[i] / pp);
  }
  return 1.0 - c;
}

void check_lengths(LossKind kind, std::span<const double> p, std::span<const double> t,
                   std::span<double> grad) {
  if (p.size() != t.size()) throw ConfigError("loss: prediction and target lengths differ");
  if (p.empty()) throw ConfigError("loss: empty vectors");
  if (!grad.empty() && grad.size() != p.size()) throw ConfigError("loss: gradient buffer length");
  if (kind == LossKind::ThrottleAndDirection && p.size() != 4)
    throw ConfigError("throttle_direction loss expects 4 components");
}

}  // namespace

double loss(LossKind kind, std::span<const double> prediction, std::span<const double> target) {
  return loss_with_gradient(kind, prediction, target, {});
}

double loss_with_gradient(LossKind kind, std::span<const double> p, std::span<const double> t,
                          std::span<double> grad) {
  check_lengths(kind, p, t, grad);
  switch (kind) {
    case LossKind::MSE: return mse(p, t, grad);
    case LossKind::Cosine: return cosine(p, t, grad);
    case LossKind::ThrottleAndDirection: {
      const double throttle = mse(p.first(1), t.first(1), grad.empty() ? grad : grad.first(1));
      const double direction = cosine(p.subspan(1), t.subspan(1), grad.empty() ? grad : grad.subspan(1));
      return throttle + direction;
    }
  }
  return 0.0;
}

}  // namespace gcnet::nn
