#pragma once

// Log-uniform (Zipf-like) candidate sampler over frequency ranks, used to draw
// shared negatives for the sampled-softmax output layer. Rank 0 is the most
// frequent class; ties broken by lower id first.

#include <cstdint>
#include <vector>

#include "textvec/common.hpp"

namespace textvec::nncore {

class LogUniformSampler {
 public:
  // frequencies[id] = corpus frequency of class id
  explicit LogUniformSampler(const std::vector<uint64_t>& frequencies);

  // P(class) under the proposal distribution
  double probability(uint32_t id) const;
  double log_probability(uint32_t id) const;

  // One draw with replacement.
  uint32_t sample_one(Rng& rng) const;

  // n distinct ids, never equal to `exclude` (pass num_classes() or larger to
  // disable exclusion). Requires n <= num_classes() - (exclude valid ? 1 : 0).
  std::vector<uint32_t> sample_distinct(size_t n, Rng& rng, uint32_t exclude) const;

  size_t num_classes() const { return rank_of_.size(); }

 private:
  std::vector<uint32_t> id_at_rank_;  // rank -> id
  std::vector<uint32_t> rank_of_;     // id -> rank
  double log_range_ = 0.0;            // ln(V + 1)
};

}  // namespace textvec::nncore
