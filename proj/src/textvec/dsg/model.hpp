#pragma once

// Multi-sense skip-gram model: k sense vectors v_{w,s} per word, output
// embeddings u_c doubling as context embeddings r_c (tied storage), and sense
// disambiguation vectors q — one shared k-row block during pretraining,
// per-word blocks afterwards. The sense posterior conditions on the mean
// context embedding:
//
//   rbar      = mean_c r_c
//   p(s|w,C)  = softmax_s(q_{w,s} . rbar)
//
// Pretraining predicts contexts from the expected embedding sum_s p_s v_{w,s};
// fine-tuning samples the sense via Gumbel-Softmax and predicts from the
// relaxed embedding sum_s z_s v_{w,s}.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "textvec/common.hpp"
#include "textvec/nncore/matrix.hpp"
#include "textvec/nncore/scalar.hpp"

namespace textvec::dsg {

template <typename T>
struct SenseModel {
  uint32_t k = 1;
  int64_t d = 0;
  nncore::Matrix<T> senses;     // (V*k) x d, row w*k + s
  nncore::Matrix<T> outputs;    // V x d; u_c and r_c (tied)
  nncore::Matrix<T> disambig;   // shared: k x d, else (V*k) x d
  bool disambig_shared = true;
  nncore::Matrix<T> marginals;          // V x k, valid once estimated
  std::vector<uint8_t> marginal_known;  // per word: 0 = never seen in corpus
  std::vector<uint8_t> active;          // V*k pruning mask (1 = active)
  uint64_t vocab_hash = 0;

  SenseModel() = default;
  SenseModel(size_t vocab, uint32_t senses_per_word, int64_t dim, uint64_t seed)
      : k(senses_per_word),
        d(dim),
        senses(static_cast<int64_t>(vocab) * senses_per_word, dim),
        outputs(static_cast<int64_t>(vocab), dim),
        disambig(senses_per_word, dim),
        marginals(static_cast<int64_t>(vocab), senses_per_word),
        marginal_known(vocab, 0),
        active(vocab * senses_per_word, 1) {
    if (k < 1) throw std::invalid_argument("sense count k must be >= 1");
    // sense embeddings random, output weights zero (they also serve as the
    // context embeddings), disambiguation vectors random on their own stream
    Rng rv(derive_seed(seed, 0));
    nncore::uniform_init(senses, rv);
    Rng rq(derive_seed(seed, 2));
    nncore::uniform_init(disambig, rq);
    for (int64_t w = 0; w < marginals.rows; ++w)
      for (uint32_t s = 0; s < k; ++s)
        marginals.row(w)[s] = static_cast<T>(1.0 / k);
  }

  size_t vocab() const { return static_cast<size_t>(outputs.rows); }

  std::span<T> sense(uint32_t w, uint32_t s) {
    return senses.row(static_cast<int64_t>(w) * k + s);
  }
  std::span<const T> sense(uint32_t w, uint32_t s) const {
    return senses.row(static_cast<int64_t>(w) * k + s);
  }
  int64_t q_row(uint32_t w, uint32_t s) const {
    return disambig_shared ? s : static_cast<int64_t>(w) * k + s;
  }
  std::span<const T> q(uint32_t w, uint32_t s) const { return disambig.row(q_row(w, s)); }

  bool sense_active(uint32_t w, uint32_t s) const {
    return active[static_cast<size_t>(w) * k + s] != 0;
  }

  // Copies the shared disambiguation block into per-word blocks.
  void broadcast_disambig() {
    if (!disambig_shared) throw std::logic_error("disambiguation vectors already per-word");
    nncore::Matrix<T> wide(static_cast<int64_t>(vocab()) * k, d);
    for (size_t w = 0; w < vocab(); ++w)
      for (uint32_t s = 0; s < k; ++s) {
        auto src = disambig.row(s);
        auto dst = wide.row(static_cast<int64_t>(w) * k + s);
        std::copy(src.begin(), src.end(), dst.begin());
      }
    disambig = std::move(wide);
    disambig_shared = false;
  }
};

// Mean of the tied context embeddings; context must be nonempty.
template <typename T>
void context_vector(const SenseModel<T>& m, std::span<const uint32_t> context,
                    std::span<T> rbar) {
  if (context.empty()) throw std::invalid_argument("context_vector: empty context");
  std::fill(rbar.begin(), rbar.end(), T(0));
  for (uint32_t c : context) {
    auto r = m.outputs.row(c);
    for (size_t i = 0; i < rbar.size(); ++i) rbar[i] += r[i];
  }
  T inv = T(1) / static_cast<T>(context.size());
  for (auto& x : rbar) x *= inv;
}

// p(s | w, rbar) = softmax over q . rbar.
template <typename T>
void sense_posterior(const SenseModel<T>& m, uint32_t word, std::span<const T> rbar,
                     std::span<T> p) {
  for (uint32_t s = 0; s < m.k; ++s) p[s] = nncore::dot(m.q(word, s), rbar);
  nncore::softmax_inplace(p);
}

// softmax((log p + g) / t) with g ~ Gumbel(0,1); log p clamped at log eps.
// k = 1 short-circuits to [1] without consuming rng draws.
template <typename T>
void gumbel_softmax_sample(std::span<const T> p, double temperature, double eps, Rng& rng,
                           std::span<T> z) {
  if (temperature <= 0.0) throw std::invalid_argument("gumbel softmax: temperature must be > 0");
  if (p.size() == 1) {
    z[0] = T(1);
    return;
  }
  double log_eps = std::log(eps);
  for (size_t s = 0; s < p.size(); ++s) {
    double lp = std::max(std::log(static_cast<double>(p[s])), log_eps);
    z[s] = static_cast<T>((lp + rng.gumbel()) / temperature);
  }
  nncore::softmax_inplace(z);
}

// sum_s weight_s * v_{w,s}; serves both the relaxed (z) and expected (p) path.
template <typename T>
void weighted_sense_sum(const SenseModel<T>& m, uint32_t word, std::span<const T> weights,
                        std::span<T> out) {
  std::fill(out.begin(), out.end(), T(0));
  for (uint32_t s = 0; s < m.k; ++s) {
    auto v = m.sense(word, s);
    T zs = weights[s];
    for (size_t i = 0; i < out.size(); ++i) out[i] += zs * v[i];
  }
}

// Huber penalty on x = sum_{i != j} v_i . v_j (ordered pairs, so each
// unordered pair counts twice). Returns the penalty and writes d(penalty)/dx.
inline double huber(double x, double* dx) {
  if (std::abs(x) <= 1.0) {
    if (dx) *dx = x;
    return 0.5 * x * x;
  }
  if (dx) *dx = x > 0 ? 1.0 : -1.0;
  return std::abs(x) - 0.5;
}

template <typename T>
double huber_parallel_penalty(const SenseModel<T>& m, uint32_t word, double* dx = nullptr) {
  if (m.k < 2) {
    if (dx) *dx = 0.0;
    return 0.0;
  }
  // sum_{i != j} v_i . v_j = |sum_i v_i|^2 - sum_i |v_i|^2
  std::vector<double> total(m.d, 0.0);
  double sq = 0.0;
  for (uint32_t s = 0; s < m.k; ++s) {
    auto v = m.sense(word, s);
    for (int64_t i = 0; i < m.d; ++i) {
      total[i] += v[i];
      sq += static_cast<double>(v[i]) * v[i];
    }
  }
  double norm2 = 0.0;
  for (double x : total) norm2 += x * x;
  return huber(norm2 - sq, dx);
}

}  // namespace textvec::dsg
