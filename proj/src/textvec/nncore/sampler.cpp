#include "textvec/nncore/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace textvec::nncore {

LogUniformSampler::LogUniformSampler(const std::vector<uint64_t>& frequencies) {
  size_t v = frequencies.size();
  if (v == 0) throw std::invalid_argument("sampler needs at least one class");
  id_at_rank_.resize(v);
  std::iota(id_at_rank_.begin(), id_at_rank_.end(), 0u);
  std::stable_sort(id_at_rank_.begin(), id_at_rank_.end(),
                   [&](uint32_t a, uint32_t b) { return frequencies[a] > frequencies[b]; });
  rank_of_.resize(v);
  for (uint32_t r = 0; r < v; ++r) rank_of_[id_at_rank_[r]] = r;
  log_range_ = std::log(static_cast<double>(v) + 1.0);
}

double LogUniformSampler::probability(uint32_t id) const {
  if (id >= rank_of_.size()) throw std::out_of_range("sampler: id out of range");
  double r = static_cast<double>(rank_of_[id]);
  return std::log((r + 2.0) / (r + 1.0)) / log_range_;
}

double LogUniformSampler::log_probability(uint32_t id) const {
  return std::log(probability(id));
}

uint32_t LogUniformSampler::sample_one(Rng& rng) const {
  // inverse CDF of P(rank = r) proportional to log((r+2)/(r+1))
  double u = rng.uniform01();
  auto r = static_cast<uint64_t>(std::exp(u * log_range_)) - 1;
  if (r >= id_at_rank_.size()) r = id_at_rank_.size() - 1;  // u ~ 1 edge
  return id_at_rank_[r];
}

std::vector<uint32_t> LogUniformSampler::sample_distinct(size_t n, Rng& rng,
                                                         uint32_t exclude) const {
  size_t v = num_classes();
  size_t avail = v - (exclude < v ? 1 : 0);
  if (n > avail)
    throw std::invalid_argument("sample_distinct: more candidates requested than classes");
  std::vector<uint32_t> out;
  out.reserve(n);
  std::vector<char> seen(v, 0);
  while (out.size() < n) {
    uint32_t id = sample_one(rng);
    if (id == exclude || seen[id]) continue;
    seen[id] = 1;
    out.push_back(id);
  }
  return out;
}

}  // namespace textvec::nncore
