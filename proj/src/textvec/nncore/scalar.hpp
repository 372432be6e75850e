#pragma once

// Scalar / small-vector numeric primitives. Natural logarithms throughout.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace textvec::nncore {

template <typename T>
T sigmoid(T x) {
  // evaluate on the non-overflowing branch
  if (x >= T(0)) {
    T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s = T(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// In-place softmax with max subtraction; finite output for any finite input.
template <typename T>
void softmax_inplace(std::span<T> x) {
  if (x.empty()) throw std::invalid_argument("softmax of empty vector");
  T mx = x[0];
  for (T v : x) mx = std::max(mx, v);
  T sum = T(0);
  for (auto& v : x) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : x) v /= sum;
}

template <typename T>
std::vector<T> softmax(std::span<const T> x) {
  std::vector<T> out(x.begin(), x.end());
  softmax_inplace(std::span<T>(out));
  return out;
}

template <typename T>
void check_prob_vector(std::span<const T> p, const char* what) {
  T sum = T(0);
  for (T v : p) {
    if (v < T(-1e-9)) throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += v;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

// Shannon entropy, natural log; 0*log(0) treated as 0.
template <typename T>
T entropy(std::span<const T> p) {
  check_prob_vector(p, "entropy");
  T s = T(0);
  for (T v : p)
    if (v > T(0)) s -= v * std::log(v);
  return s;
}

// Cross-entropy -sum a_i log b_i between probability vectors.
template <typename T>
T cross_entropy(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cross_entropy: size mismatch");
  check_prob_vector(a, "cross_entropy(a)");
  check_prob_vector(b, "cross_entropy(b)");
  T s = T(0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > T(0)) {
      if (b[i] <= T(0))
        throw std::invalid_argument("cross_entropy: zero predicted mass on a supported class");
      s -= a[i] * std::log(b[i]);
    }
  }
  return s;
}

template <typename T>
T norm(std::span<const T> a) {
  return std::sqrt(dot(a, a));
}

template <typename T>
T cosine(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: size mismatch");
  T na = norm(a), nb = norm(b);
  if (na == T(0) || nb == T(0))
    throw std::invalid_argument("cosine similarity of a zero vector is undefined");
  return dot(a, b) / (na * nb);
}

}  // namespace textvec::nncore
