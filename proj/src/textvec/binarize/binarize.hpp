#pragma once

// Coding-layer binarization strategies. All of them squash a pre-activation x
// through a sigmoid with optional slope s and quantize to {0,1}; they differ
// in how the forward pass quantizes during training and which surrogate
// gradient the backward pass uses.
//
//   rounded sigmoid   forward round(sigma(s x)) in train and inference,
//                     backward sigma'(s x) * s
//   gaussian noise    forward sigma(s x + e), e ~ N(0, noise_std^2), during
//                     training (no rounding; the noise itself pushes
//                     activations to the rails), rounded sigma at inference,
//                     backward ignores the noise
//   stochastic unit   forward Bernoulli(sigma(s x)) during training, rounded
//                     sigma at inference; straight-through backward, either
//                     identity or sigma'(s x) * s
//
// Slope annealing raises s by a fixed increment each epoch, starting at 1.

#include <cmath>
#include <span>
#include <stdexcept>

#include "textvec/common.hpp"
#include "textvec/nncore/scalar.hpp"

namespace textvec::binarize {

enum class BinarizerKind : uint8_t {
  none = 0,         // identity activation (real-valued codes)
  krizhevsky = 1,   // deterministic rounded sigmoid
  gaussian = 2,     // noisy sigmoid
  bsn_identity = 3, // stochastic unit, identity straight-through
  bsn_sigmoid = 4,  // stochastic unit, sigmoid-derivative straight-through
};

const char* binarizer_name(BinarizerKind k);
BinarizerKind binarizer_from_name(const std::string& name);

enum class Phase {
  train,
  infer,
  smooth,  // sigma(s x) with no quantization/noise; used by gradient checks
};

struct BinarizationStrategy {
  BinarizerKind kind = BinarizerKind::none;
  double noise_std = 0.4;
  bool anneal = false;
  double anneal_increment = 0.1;
  double slope = 1.0;

  void set_epoch(int epoch) {
    slope = anneal ? 1.0 + anneal_increment * epoch : 1.0;
  }

  bool active() const { return kind != BinarizerKind::none; }

  // Elementwise forward. rng is consulted only in the train phase of the
  // gaussian and stochastic kinds.
  template <typename T>
  void forward(std::span<const T> x, std::span<T> out, Phase phase, Rng* rng) const {
    double s = slope;
    for (size_t i = 0; i < x.size(); ++i) {
      double a = s * static_cast<double>(x[i]);
      switch (kind) {
        case BinarizerKind::none:
          out[i] = x[i];
          break;
        case BinarizerKind::krizhevsky:
          out[i] = static_cast<T>(phase == Phase::smooth
                                      ? nncore::sigmoid(a)
                                      : std::round(nncore::sigmoid(a)));
          break;
        case BinarizerKind::gaussian:
          if (phase == Phase::train) {
            out[i] = static_cast<T>(nncore::sigmoid(a + rng->normal(0.0, noise_std)));
          } else if (phase == Phase::smooth) {
            out[i] = static_cast<T>(nncore::sigmoid(a));
          } else {
            out[i] = static_cast<T>(std::round(nncore::sigmoid(a)));
          }
          break;
        case BinarizerKind::bsn_identity:
        case BinarizerKind::bsn_sigmoid: {
          double p = nncore::sigmoid(a);
          if (phase == Phase::train) {
            out[i] = static_cast<T>(rng->uniform01() < p ? 1.0 : 0.0);
          } else if (phase == Phase::smooth) {
            out[i] = static_cast<T>(p);
          } else {
            out[i] = static_cast<T>(std::round(p));
          }
          break;
        }
      }
    }
  }

  // Elementwise surrogate gradient: d_out -> d_x given pre-activation x.
  template <typename T>
  void backward(std::span<const T> d_out, std::span<const T> x, std::span<T> d_x) const {
    double s = slope;
    for (size_t i = 0; i < x.size(); ++i) {
      switch (kind) {
        case BinarizerKind::none:
        case BinarizerKind::bsn_identity:
          d_x[i] = d_out[i];
          break;
        case BinarizerKind::krizhevsky:
        case BinarizerKind::gaussian:
        case BinarizerKind::bsn_sigmoid: {
          double sg = nncore::sigmoid(s * static_cast<double>(x[i]));
          d_x[i] = static_cast<T>(static_cast<double>(d_out[i]) * sg * (1.0 - sg) * s);
          break;
        }
      }
    }
  }
};

}  // namespace textvec::binarize
