#pragma once

// Sampled-softmax output layer. The full-vocabulary softmax is approximated on
// a candidate set [true class, negatives...]; negative ids come from the
// log-uniform sampler and are shared across a mini-batch, with the true class
// of each example removed from its own candidate list by the caller. Logits
// are optionally corrected by subtracting the log proposal probability of each
// candidate, which keeps the truncated softmax an estimate of the full one.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "textvec/nncore/matrix.hpp"
#include "textvec/nncore/scalar.hpp"

namespace textvec::nncore {

template <typename T>
class SampledSoftmax {
 public:
  // Forward pass; returns the loss -log softmax(logits)[0]. candidates[0] must
  // be the true class; all candidates must be distinct rows of `weights`.
  // `bias` is empty when the layer has no bias; `log_proposal`, when nonempty,
  // holds one correction per candidate.
  T forward(std::span<const T> h, std::span<const uint32_t> candidates,
            const Matrix<T>& weights, std::span<const T> bias,
            std::span<const double> log_proposal) {
    size_t n = candidates.size();
    if (n == 0) throw std::invalid_argument("sampled softmax with no candidates");
    if (!log_proposal.empty() && log_proposal.size() != n)
      throw std::invalid_argument("log_proposal size mismatch");
    probs_.resize(n);
    for (size_t j = 0; j < n; ++j) {
      T l = dot(h, weights.row(candidates[j]));
      if (!bias.empty()) l += bias[candidates[j]];
      if (!log_proposal.empty()) l -= static_cast<T>(log_proposal[j]);
      probs_[j] = l;
    }
    softmax_inplace(std::span<T>(probs_));
    return -std::log(probs_[0]);
  }

  // dL/dlogit_j = probs[j] - [j == 0]
  T coeff(size_t j) const { return probs_[j] - (j == 0 ? T(1) : T(0)); }

  // Accumulates dL/dh += sum_j coeff(j) * W_j.
  void add_input_grad(std::span<const uint32_t> candidates, const Matrix<T>& weights,
                      std::span<T> dh) const {
    for (size_t j = 0; j < probs_.size(); ++j) {
      T c = coeff(j);
      auto w = weights.row(candidates[j]);
      for (size_t i = 0; i < dh.size(); ++i) dh[i] += c * w[i];
    }
  }

  std::span<const T> probs() const { return probs_; }

 private:
  std::vector<T> probs_;
};

// Mini-batch bookkeeping for trainers: one shared negative draw per batch and
// the per-example candidate list with the example's true class removed from
// the shared negatives (accidental-hit removal).
struct SampledBatch {
  std::vector<uint32_t> negatives;       // shared across the batch
  std::vector<double> negative_logq;     // proposal corrections, same order

  std::vector<uint32_t> candidates;      // scratch: [true, filtered negatives]
  std::vector<double> logq;              // scratch: corrections for candidates

  template <typename Sampler>
  void draw(const Sampler& sampler, size_t n, Rng& rng) {
    negatives = sampler.sample_distinct(n, rng, static_cast<uint32_t>(sampler.num_classes()));
    negative_logq.resize(negatives.size());
    for (size_t i = 0; i < negatives.size(); ++i)
      negative_logq[i] = sampler.log_probability(negatives[i]);
  }

  // Builds the candidate list for one example.
  void assemble(uint32_t true_id, double true_logq, bool correct) {
    candidates.clear();
    logq.clear();
    candidates.push_back(true_id);
    if (correct) logq.push_back(true_logq);
    for (size_t i = 0; i < negatives.size(); ++i) {
      if (negatives[i] == true_id) continue;
      candidates.push_back(negatives[i]);
      if (correct) logq.push_back(negative_logq[i]);
    }
  }
};

}  // namespace textvec::nncore
