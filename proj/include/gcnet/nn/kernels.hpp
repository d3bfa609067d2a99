#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gcnet/nn/network.hpp"

// Batched dense-layer kernels. The default namespace holds the OpenMP versions used
// in training and evaluation; `reference` holds plain serial loops kept as the test
// oracle and benchmark baseline. Every parallel kernel partitions work so that each
// output element is reduced by exactly one thread in a fixed order, which makes the
// results independent of the thread count.
namespace gcnet::nn {

/// Row-major batch matrix; one sample per row.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.resize(r * c);
  }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<double> row_span(std::size_t i) { return {row(i), cols}; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

namespace kernels {

/// pre = scale * (in W^T) + b for every row of `in`.
void dense_forward(const Matrix& in, const Layer& layer, double scale, Matrix& pre);

/// out = act(pre) element-wise.
void activate(const Matrix& pre, ActivationKind kind, Matrix& out);

/// Given dL/dpre (`delta`) and the layer input, accumulates
///   grad_w = scale * delta^T in,  grad_b = sum_rows delta
/// and, when `grad_in` is non-null, grad_in = scale * delta W.
void dense_backward(const Matrix& in, const Layer& layer, double scale, const Matrix& delta,
                    std::span<double> grad_w, std::span<double> grad_b, Matrix* grad_in);

/// delta = grad_out * act'(pre) element-wise, with `post` the activated output.
void activation_backward(const Matrix& pre, const Matrix& post, ActivationKind kind,
                         const Matrix& grad_out, Matrix& delta);

}  // namespace kernels

namespace kernels::reference {

void dense_forward(const Matrix& in, const Layer& layer, double scale, Matrix& pre);
void dense_backward(const Matrix& in, const Layer& layer, double scale, const Matrix& delta,
                    std::span<double> grad_w, std::span<double> grad_b, Matrix* grad_in);

}  // namespace kernels::reference

}  // namespace gcnet::nn
