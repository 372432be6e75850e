#pragma once

// Independent reference implementations used to cross-check the library's
// metrics. Everything is written as plainly as possible (quadratic loops, no
// shared helpers) so a library bug cannot hide in a shared code path. The
// sense-similarity references reproduce the library's mixed float/double
// evaluation order, so agreement is exact rather than approximate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "textvec/binarize/binary_code.hpp"
#include "textvec/dsg/model.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// retrieval metrics

// AP with precision-at-hit recomputed from scratch at every hit.
inline std::optional<double> average_precision(const std::vector<double>& rels,
                                               double threshold) {
  size_t total = 0;
  for (double r : rels)
    if (r > threshold) ++total;
  if (total == 0) return std::nullopt;
  double sum = 0.0;
  for (size_t i = 0; i < rels.size(); ++i) {
    if (!(rels[i] > threshold)) continue;
    size_t hits = 0;
    for (size_t j = 0; j <= i; ++j)
      if (rels[j] > threshold) ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(total);
}

inline double dcg_at_k(const std::vector<double>& rels, size_t k) {
  size_t n = std::min(k, rels.size());
  double dcg = 0.0;
  for (size_t i = 1; i <= n; ++i)
    dcg += i == 1 ? rels[0] : rels[i - 1] / std::log2(static_cast<double>(i));
  return dcg;
}

inline double ndcg_at_k(const std::vector<double>& ranked, const std::vector<double>& all,
                        size_t k) {
  std::vector<double> ideal = all;
  std::sort(ideal.begin(), ideal.end());
  std::reverse(ideal.begin(), ideal.end());
  double denom = dcg_at_k(ideal, k);
  if (denom <= 0.0) return 0.0;
  return dcg_at_k(ranked, k) / denom;
}

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// Interpolation-free averaged PR curve: at each recall level, walk the hit
// list for the smallest hit count reaching that recall.
inline std::vector<PrPoint> pr_curve(const std::vector<std::vector<double>>& per_query,
                                     size_t levels, double threshold) {
  std::vector<PrPoint> pts(levels);
  for (size_t j = 0; j < levels; ++j)
    pts[j].recall = static_cast<double>(j + 1) / static_cast<double>(levels);
  size_t used = 0;
  for (const auto& rels : per_query) {
    std::vector<size_t> hit_pos;  // 1-based rank of each relevant doc
    for (size_t i = 0; i < rels.size(); ++i)
      if (rels[i] > threshold) hit_pos.push_back(i + 1);
    if (hit_pos.empty()) continue;
    ++used;
    double total = static_cast<double>(hit_pos.size());
    for (size_t j = 0; j < levels; ++j) {
      size_t h = 1;
      while (h < hit_pos.size() && static_cast<double>(h) / total < pts[j].recall) ++h;
      pts[j].precision += static_cast<double>(h) / static_cast<double>(hit_pos[h - 1]);
    }
  }
  if (used > 0)
    for (auto& pt : pts) pt.precision /= static_cast<double>(used);
  return pts;
}

// ---------------------------------------------------------------------------
// clustering / correlation

inline double adjusted_rand_index(const std::vector<uint32_t>& pred,
                                  const std::vector<uint32_t>& gold) {
  auto dense = [](const std::vector<uint32_t>& v) {
    std::vector<uint32_t> out(v.size());
    std::vector<uint32_t> seen;
    for (size_t i = 0; i < v.size(); ++i) {
      size_t at = 0;
      while (at < seen.size() && seen[at] != v[i]) ++at;
      if (at == seen.size()) seen.push_back(v[i]);
      out[i] = static_cast<uint32_t>(at);
    }
    return out;
  };
  std::vector<uint32_t> p = dense(pred), g = dense(gold);
  uint32_t np = *std::max_element(p.begin(), p.end()) + 1;
  uint32_t ng = *std::max_element(g.begin(), g.end()) + 1;
  std::vector<uint64_t> cell(static_cast<size_t>(np) * ng, 0), rsum(np, 0), csum(ng, 0);
  for (size_t i = 0; i < p.size(); ++i) {
    ++cell[static_cast<size_t>(p[i]) * ng + g[i]];
    ++rsum[p[i]];
    ++csum[g[i]];
  }
  auto c2 = [](double n) { return n * (n - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (uint64_t n : cell) sum_cells += c2(static_cast<double>(n));
  for (uint64_t n : rsum) sum_rows += c2(static_cast<double>(n));
  for (uint64_t n : csum) sum_cols += c2(static_cast<double>(n));
  double total_pairs = c2(static_cast<double>(p.size()));
  double expected = total_pairs > 0.0 ? sum_rows * sum_cols / total_pairs : 0.0;
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index - expected == 0.0) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

// Fractional rank of each value by pairwise counting.
inline std::vector<double> fractional_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    size_t less = 0, equal = 0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    r[i] = static_cast<double>(less) + (1.0 + static_cast<double>(equal)) / 2.0;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> ra = fractional_ranks(a), rb = fractional_ranks(b);
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double num = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < ra.size(); ++i) {
    double da = ra[i] - ma, db = rb[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  return num / std::sqrt(va * vb);
}

// ---------------------------------------------------------------------------
// sense similarities (float accumulation mirrored from the library)

inline float fdot(std::span<const float> a, std::span<const float> b) {
  float s = 0.0f;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sense_cosine(const textvec::dsg::SenseModel<float>& m, uint32_t w1, uint32_t s1,
                           uint32_t w2, uint32_t s2) {
  auto a = m.sense(w1, s1);
  auto b = m.sense(w2, s2);
  double na = std::sqrt(fdot(a, a));  // float sqrt, then promoted
  double nb = std::sqrt(fdot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return fdot(a, b) / (na * nb);
}

inline std::vector<float> posterior_or_marginals(const textvec::dsg::SenseModel<float>& m,
                                                 uint32_t w,
                                                 const std::vector<uint32_t>& ctx) {
  std::vector<float> p(m.k, 0.0f);
  if (ctx.empty()) {
    auto row = m.marginals.row(w);
    for (uint32_t s = 0; s < m.k; ++s) p[s] = row[s];
    return p;
  }
  std::vector<float> rbar(static_cast<size_t>(m.d), 0.0f);
  for (uint32_t c : ctx) {
    auto r = m.outputs.row(c);
    for (size_t i = 0; i < rbar.size(); ++i) rbar[i] += r[i];
  }
  float inv = 1.0f / static_cast<float>(ctx.size());
  for (auto& x : rbar) x *= inv;
  for (uint32_t s = 0; s < m.k; ++s)
    p[s] = fdot(m.q(w, s), std::span<const float>(rbar));
  float mx = p[0];
  for (float v : p) mx = std::max(mx, v);
  float sum = 0.0f;
  for (auto& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

inline double avg_sim_c(const textvec::dsg::SenseModel<float>& m, uint32_t w1,
                        const std::vector<uint32_t>& c1, uint32_t w2,
                        const std::vector<uint32_t>& c2) {
  auto p1 = posterior_or_marginals(m, w1, c1);
  auto p2 = posterior_or_marginals(m, w2, c2);
  double sim = 0.0;
  for (uint32_t s1 = 0; s1 < m.k; ++s1)
    for (uint32_t s2 = 0; s2 < m.k; ++s2)
      sim += static_cast<double>(p1[s1]) * p2[s2] * sense_cosine(m, w1, s1, w2, s2);
  return sim;
}

inline double max_sim_c(const textvec::dsg::SenseModel<float>& m, uint32_t w1,
                        const std::vector<uint32_t>& c1, uint32_t w2,
                        const std::vector<uint32_t>& c2) {
  auto p1 = posterior_or_marginals(m, w1, c1);
  auto p2 = posterior_or_marginals(m, w2, c2);
  uint32_t b1 = 0, b2 = 0;
  for (uint32_t s = 1; s < m.k; ++s) {
    if (p1[s] > p1[b1]) b1 = s;
    if (p2[s] > p2[b2]) b2 = s;
  }
  return sense_cosine(m, w1, b1, w2, b2);
}

inline double avg_sim(const textvec::dsg::SenseModel<float>& m, uint32_t w1, uint32_t w2) {
  double sim = 0.0;
  for (uint32_t s1 = 0; s1 < m.k; ++s1)
    for (uint32_t s2 = 0; s2 < m.k; ++s2) sim += sense_cosine(m, w1, s1, w2, s2);
  return sim / (static_cast<double>(m.k) * m.k);
}

// ---------------------------------------------------------------------------
// search

inline uint32_t hamming_bits(const textvec::binarize::BinaryCode& a,
                             const textvec::binarize::BinaryCode& b) {
  uint32_t d = 0;
  for (uint32_t i = 0; i < a.width; ++i)
    if (a.get(i) != b.get(i)) ++d;
  return d;
}

inline double cosine_or_zero(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct ScoredDoc {
  uint32_t doc = 0;
  double score = 0.0;
};

// Hamming filter, then cosine sort (score descending, doc ascending).
inline std::vector<ScoredDoc> filter_then_rank(
    const textvec::binarize::BinaryCode& query_code, const std::vector<double>& query_real,
    const std::vector<textvec::binarize::BinaryCode>& codes,
    const std::vector<std::vector<double>>& vectors, uint32_t radius,
    std::optional<uint32_t> exclude) {
  std::vector<ScoredDoc> out;
  for (uint32_t d = 0; d < codes.size(); ++d) {
    if (exclude && *exclude == d) continue;
    if (hamming_bits(query_code, codes[d]) > radius) continue;
    out.push_back({d, cosine_or_zero(query_real, vectors[d])});
  }
  std::sort(out.begin(), out.end(), [](const ScoredDoc& x, const ScoredDoc& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.doc < y.doc;
  });
  return out;
}

}  // namespace oracles
