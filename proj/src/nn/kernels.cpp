#include "gcnet/nn/kernels.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace gcnet::nn::kernels {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

// Work is split into fixed-size blocks (never into per-thread shares), so the
// floating-point evaluation order of every element is the same for any thread count.
constexpr std::size_t kRowBlock = 64;
constexpr std::size_t kOutBlock = 16;

std::ptrdiff_t block_count(std::size_t n, std::size_t block) {
  return static_cast<std::ptrdiff_t>((n + block - 1) / block);
}

}  // namespace

void dense_forward(const Matrix& in, const Layer& layer, double scale, Matrix& pre) {
  const std::size_t n = in.rows;
  const std::size_t fi = layer.fan_in;
  const std::size_t fo = layer.fan_out;
  pre.resize(n, fo);
  const ConstMap w(layer.weights.data(), static_cast<Eigen::Index>(fo), static_cast<Eigen::Index>(fi));
  const Eigen::Map<const Eigen::RowVectorXd> b(layer.biases.data(), static_cast<Eigen::Index>(fo));
  const std::ptrdiff_t blocks = block_count(n, kRowBlock);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
    const std::size_t r0 = static_cast<std::size_t>(blk) * kRowBlock;
    const auto rows = static_cast<Eigen::Index>(std::min(kRowBlock, n - r0));
    const ConstMap x(in.row(r0), rows, static_cast<Eigen::Index>(fi));
    MutMap z(pre.row(r0), rows, static_cast<Eigen::Index>(fo));
    z.noalias() = x * w.transpose();
    z *= scale;
    z.rowwise() += b;
  }
}

void activate(const Matrix& pre, ActivationKind kind, Matrix& out) {
  out.resize(pre.rows, pre.cols);
  const auto total = static_cast<std::ptrdiff_t>(pre.data.size());
  const double* z = pre.data.data();
  double* a = out.data.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i) a[i] = nn::activate(kind, z[i]);
}

void activation_backward(const Matrix& pre, const Matrix& post, ActivationKind kind,
                         const Matrix& grad_out, Matrix& delta) {
  delta.resize(pre.rows, pre.cols);
  const auto total = static_cast<std::ptrdiff_t>(pre.data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i)
    delta.data[i] = grad_out.data[i] * activate_derivative(kind, pre.data[i], post.data[i]);
}

void dense_backward(const Matrix& in, const Layer& layer, double scale, const Matrix& delta,
                    std::span<double> grad_w, std::span<double> grad_b, Matrix* grad_in) {
  const std::size_t n = in.rows;
  const std::size_t fi = layer.fan_in;
  const std::size_t fo = layer.fan_out;
  const auto en = static_cast<Eigen::Index>(n);
  const ConstMap x(in.data.data(), en, static_cast<Eigen::Index>(fi));
  const ConstMap d(delta.data.data(), en, static_cast<Eigen::Index>(fo));
  const std::ptrdiff_t out_blocks = block_count(fo, kOutBlock);

  // Each block of grad_w rows is owned by one thread.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < out_blocks; ++blk) {
    const std::size_t o0 = static_cast<std::size_t>(blk) * kOutBlock;
    const auto cnt = static_cast<Eigen::Index>(std::min(kOutBlock, fo - o0));
    MutMap gw(grad_w.data() + o0 * fi, cnt, static_cast<Eigen::Index>(fi));
    gw.noalias() = d.middleCols(static_cast<Eigen::Index>(o0), cnt).transpose() * x;
    gw *= scale;
    for (Eigen::Index j = 0; j < cnt; ++j) {
      const std::size_t o = o0 + static_cast<std::size_t>(j);
      double gb = 0.0;
      for (std::size_t r = 0; r < n; ++r) gb += delta(r, o);
      grad_b[o] = gb;
    }
  }

  if (grad_in == nullptr) return;
  grad_in->resize(n, fi);
  const ConstMap w(layer.weights.data(), static_cast<Eigen::Index>(fo), static_cast<Eigen::Index>(fi));
  const std::ptrdiff_t row_blocks = block_count(n, kRowBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < row_blocks; ++blk) {
    const std::size_t r0 = static_cast<std::size_t>(blk) * kRowBlock;
    const auto rows = static_cast<Eigen::Index>(std::min(kRowBlock, n - r0));
    MutMap gx(grad_in->row(r0), rows, static_cast<Eigen::Index>(fi));
    gx.noalias() = d.middleRows(static_cast<Eigen::Index>(r0), rows) * w;
    gx *= scale;
  }
}

namespace reference {

void dense_forward(const Matrix& in, const Layer& layer, double scale, Matrix& pre) {
  pre.resize(in.rows, layer.fan_out);
  for (std::size_t r = 0; r < in.rows; ++r) {
    for (std::size_t o = 0; o < layer.fan_out; ++o) {
      double acc = 0.0;
      for (std::size_t k = 0; k < layer.fan_in; ++k) acc += layer.weight(o, k) * in(r, k);
      pre(r, o) = scale * acc + layer.biases[o];
    }
  }
}

void dense_backward(const Matrix& in, const Layer& layer, double scale, const Matrix& delta,
                    std::span<double> grad_w, std::span<double> grad_b, Matrix* grad_in) {
  const std::size_t fi = layer.fan_in;
  for (std::size_t o = 0; o < layer.fan_out; ++o) {
    double gb = 0.0;
    for (std::size_t r = 0; r < in.rows; ++r) gb += delta(r, o);
    grad_b[o] = gb;
    for (std::size_t k = 0; k < fi; ++k) {
      double acc = 0.0;
      for (std::size_t r = 0; r < in.rows; ++r) acc += delta(r, o) * in(r, k);
      grad_w[o * fi + k] = scale * acc;
    }
  }
  if (grad_in == nullptr) return;
  grad_in->resize(in.rows, fi);
  for (std::size_t r = 0; r < in.rows; ++r) {
    for (std::size_t k = 0; k < fi; ++k) {
      double acc = 0.0;
      for (std::size_t o = 0; o < layer.fan_out; ++o) acc += delta(r, o) * layer.weight(o, k);
      (*grad_in)(r, k) = scale * acc;
    }
  }
}

}  // namespace reference

}  // namespace gcnet::nn::kernels
