#include "gcnet/nn/optim.hpp"

#include <cmath>
#include <limits>

#include "gcnet/common/error.hpp"

namespace gcnet::nn {

AdamState AdamState::for_network(const Network& net, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.m = Gradients::zeros_like(net);
  s.v = Gradients::zeros_like(net);
  return s;
}

namespace {

void update_tensor(std::vector<double>& param, const std::vector<double>& grad, std::vector<double>& m,
                   std::vector<double>& v, const AdamConfig& c, double lr, double correction1,
                   double correction2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i] + c.weight_decay * param[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

void adam_step(AdamState& state, Network& net, const Gradients& grads, double lr) {
  auto layers = net.layers();
  if (grads.weights.size() != layers.size() || state.m.weights.size() != layers.size())
    throw ConfigError("adam_step: state shape does not match network");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (double g : grads.weights[i])
      if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient in layer " + std::to_string(i));
    for (double g : grads.biases[i])
      if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient in layer " + std::to_string(i));
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.config.beta1, t);
  const double c2 = 1.0 - std::pow(state.config.beta2, t);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update_tensor(layers[i].weights, grads.weights[i], state.m.weights[i], state.v.weights[i], state.config, lr, c1, c2);
    update_tensor(layers[i].biases, grads.biases[i], state.m.biases[i], state.v.biases[i], state.config, lr, c1, c2);
  }
}

PlateauScheduler::PlateauScheduler(double initial_lr, double factor, int patience, double threshold)
    : lr_(initial_lr),
      factor_(factor),
      patience_(patience),
      threshold_(threshold),
      best_(std::numeric_limits<double>::infinity()) {
  if (!(initial_lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(factor > 0.0 && factor < 1.0)) throw ConfigError("scheduler factor must lie in (0, 1)");
  if (patience < 1) throw ConfigError("scheduler patience must be >= 1");
  if (threshold < 0.0) throw ConfigError("scheduler threshold must be >= 0");
}

double PlateauScheduler::step(double epoch_loss) {
  if (!std::isfinite(epoch_loss)) throw NumericalError("scheduler: non-finite epoch loss");
  if (epoch_loss < best_ * (1.0 - threshold_) || best_ == std::numeric_limits<double>::infinity()) {
    best_ = epoch_loss;
    bad_epochs_ = 0;
  } else if (++bad_epochs_ >= patience_) {
    lr_ *= factor_;
    bad_epochs_ = 0;
    ++reductions_;
  }
  return lr_;
}

}  // namespace gcnet::nn
