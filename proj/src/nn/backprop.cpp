#include "gcnet/nn/backprop.hpp"

#include <cmath>
#include <string>

#include "gcnet/common/error.hpp"

namespace gcnet::nn {

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  for (const Layer& l : net.layers()) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.biases.emplace_back(l.biases.size(), 0.0);
  }
  return g;
}

void Gradients::set_zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> flat;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    flat.insert(flat.end(), weights[i].begin(), weights[i].end());
    flat.insert(flat.end(), biases[i].begin(), biases[i].end());
  }
  return flat;
}

namespace {

void require_finite(const Matrix& m, std::size_t layer, const char* what) {
  for (double v : m.data)
    if (!std::isfinite(v))
      throw NumericalError(std::string("non-finite ") + what + " in layer " + std::to_string(layer));
}

}  // namespace

void forward_batch(const Network& net, const Matrix& inputs, Workspace& ws) {
  if (inputs.cols != net.input_dim()) throw ConfigError("forward_batch: input width mismatch");
  const auto layers = net.layers();
  ws.pre.resize(layers.size());
  ws.post.resize(layers.size());
  const Matrix* current = &inputs;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    kernels::dense_forward(*current, l, l.activation.input_scale(), ws.pre[i]);
    kernels::activate(ws.pre[i], l.activation.kind, ws.post[i]);
    if (i + 1 == layers.size()) {
      for (std::size_t r = 0; r < ws.post[i].rows; ++r)
        apply_heads(net.spec().output_heads, ws.post[i].row_span(r));
    }
    require_finite(ws.post[i], i, "activation");
    current = &ws.post[i];
  }
}

Matrix forward_batch(const Network& net, const Matrix& inputs) {
  Workspace ws;
  forward_batch(net, inputs, ws);
  return std::move(ws.post.back());
}

double batch_loss(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind,
                  Workspace& ws) {
  if (inputs.rows == 0) throw ConfigError("batch_loss: empty batch");
  forward_batch(net, inputs, ws);
  const Matrix& out = ws.post.back();
  double total = 0.0;
  for (std::size_t r = 0; r < out.rows; ++r) total += loss(kind, out.row_span(r), targets.row_span(r));
  return total / static_cast<double>(out.rows);
}

double backward(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind,
                Gradients& grads, Workspace& ws) {
  if (inputs.rows == 0) throw ConfigError("backward: empty batch");
  if (targets.rows != inputs.rows || targets.cols != net.output_dim())
    throw ConfigError("backward: target shape mismatch");
  forward_batch(net, inputs, ws);
  const auto layers = net.layers();
  const std::size_t last = layers.size() - 1;
  const std::size_t n = inputs.rows;
  const double inv_n = 1.0 / static_cast<double>(n);

  // dL/d(head output), scaled for the batch mean.
  const Matrix& out = ws.post[last];
  ws.grad.resize(n, out.cols);
  ws.sample_loss.resize(n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ri = 0; ri < rows; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    ws.sample_loss[r] = loss_with_gradient(kind, out.row_span(r), targets.row_span(r), ws.grad.row_span(r));
    for (double& g : ws.grad.row_span(r)) g *= inv_n;
  }
  double total = 0.0;
  for (double l : ws.sample_loss) total += l;

  // Through the heads of the output layer.
  const auto& heads = net.spec().output_heads;
  ws.delta.resize(n, out.cols);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < out.cols; ++c)
      ws.delta(r, c) = ws.grad(r, c) * activate_derivative(heads[c], ws.pre[last](r, c), out(r, c));

  if (grads.weights.size() != layers.size()) grads = Gradients::zeros_like(net);
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Layer& l = layers[i];
    const Matrix& layer_in = i == 0 ? inputs : ws.post[i - 1];
    kernels::dense_backward(layer_in, l, l.activation.input_scale(), ws.delta, grads.weights[i],
                            grads.biases[i], i == 0 ? nullptr : &ws.grad_in);
    if (i == 0) break;
    require_finite(ws.grad_in, i, "gradient");
    kernels::activation_backward(ws.pre[i - 1], ws.post[i - 1], layers[i - 1].activation.kind,
                                 ws.grad_in, ws.delta);
  }
  return total * inv_n;
}

Gradients backward(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind) {
  Gradients g = Gradients::zeros_like(net);
  Workspace ws;
  backward(net, inputs, targets, kind, g, ws);
  return g;
}

}  // namespace gcnet::nn
