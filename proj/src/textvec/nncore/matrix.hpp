#pragma once

// Dense row-major parameter matrix with per-element AdaGrad state, plus the
// update/init/dropout primitives shared by every trainer. Templated on the
// scalar type: float for training, double for gradient checking.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "textvec/common.hpp"

namespace textvec::nncore {

template <typename T>
struct Matrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<T> values;
  std::vector<T> accum;  // AdaGrad squared-gradient accumulators, same shape

  Matrix() = default;
  Matrix(int64_t r, int64_t c)
      : rows(r), cols(c), values(static_cast<size_t>(r * c), T(0)),
        accum(static_cast<size_t>(r * c), T(0)) {
    if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
  }

  std::span<T> row(int64_t r) {
    return std::span<T>(values.data() + r * cols, static_cast<size_t>(cols));
  }
  std::span<const T> row(int64_t r) const {
    return std::span<const T>(values.data() + r * cols, static_cast<size_t>(cols));
  }
  std::span<T> accum_row(int64_t r) {
    return std::span<T>(accum.data() + r * cols, static_cast<size_t>(cols));
  }

  bool same_values(const Matrix& o) const {
    if (rows != o.rows || cols != o.cols) return false;
    for (size_t i = 0; i < values.size(); ++i)
      if (values[i] != o.values[i]) return false;
    return true;
  }

  bool all_finite() const {
    for (T v : values)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

// Uniform init in [-0.5/cols, 0.5/cols], one draw per element in row-major
// order; accumulators stay zero.
template <typename T>
void uniform_init(Matrix<T>& m, Rng& rng) {
  double half = 0.5 / static_cast<double>(m.cols);
  for (auto& v : m.values) v = static_cast<T>(rng.uniform(-half, half));
}

// AdaGrad row update: accum += g^2; theta -= lr * g / (sqrt(accum) + eps).
// First-step effective rate is lr * g / (|g| + eps) as the accumulators start
// at zero.
template <typename T>
void adagrad_update(std::span<T> theta, std::span<T> accum, std::span<const T> grad,
                    T lr, T eps) {
  for (size_t i = 0; i < theta.size(); ++i) {
    T g = grad[i];
    accum[i] += g * g;
    theta[i] -= lr * g / (std::sqrt(accum[i]) + eps);
  }
}

template <typename T>
void adagrad_update_row(Matrix<T>& m, int64_t r, std::span<const T> grad, T lr, T eps) {
  adagrad_update(m.row(r), m.accum_row(r), grad, lr, eps);
}

// Inverted dropout: mask entries are 0 with probability 1-keep, else 1/keep,
// so no rescaling is needed at inference. keep must be in (0, 1].
template <typename T>
void fill_dropout_mask(std::span<T> mask, double keep, Rng& rng) {
  if (!(keep > 0.0 && keep <= 1.0))
    throw std::invalid_argument("dropout keep probability must be in (0,1]");
  T inv = static_cast<T>(1.0 / keep);
  for (auto& v : mask) v = rng.uniform01() < keep ? inv : T(0);
}

}  // namespace textvec::nncore
