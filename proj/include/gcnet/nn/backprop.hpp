#pragma once

#include <vector>

#include "gcnet/nn/kernels.hpp"
#include "gcnet/nn/loss.hpp"
#include "gcnet/nn/network.hpp"

namespace gcnet::nn {

/// Parameter-shaped tensors: one weight and one bias buffer per layer.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const Network& net);
  void set_zero();
  std::vector<double> flatten() const;
};

/// Per-layer activations kept between the forward and backward passes.
struct Workspace {
  std::vector<Matrix> pre;   // pre-activations per layer
  std::vector<Matrix> post;  // activations per layer (heads applied on the last)
  Matrix grad;
  Matrix delta;
  Matrix grad_in;
  std::vector<double> sample_loss;
};

/// Batched forward pass; returns one output row per input row.
Matrix forward_batch(const Network& net, const Matrix& inputs);
void forward_batch(const Network& net, const Matrix& inputs, Workspace& ws);

/// Mean batch loss without gradients.
double batch_loss(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind,
                  Workspace& ws);

/// Analytic gradient of the mean batch loss. Returns the mean loss.
/// Throws NumericalError naming the layer on any non-finite intermediate.
double backward(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind,
                Gradients& grads, Workspace& ws);

Gradients backward(const Network& net, const Matrix& inputs, const Matrix& targets, LossKind kind);

}  // namespace gcnet::nn
