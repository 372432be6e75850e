#include "textvec/evalir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textvec::evalir {

namespace {

size_t sorted_intersection_size(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double RelevanceJudge::operator()(std::span<const uint32_t> query_labels,
                                  std::span<const uint32_t> doc_labels) const {
  switch (kind) {
    case JudgeKind::exact_label:
      return (!query_labels.empty() && query_labels.size() == doc_labels.size() &&
              std::equal(query_labels.begin(), query_labels.end(), doc_labels.begin()))
                 ? 1.0
                 : 0.0;
    case JudgeKind::shared_category:
      return sorted_intersection_size(query_labels, doc_labels) > 0 ? 1.0 : 0.0;
    case JudgeKind::overlap_fraction: {
      size_t inter = sorted_intersection_size(query_labels, doc_labels);
      if (inter == 0) return 0.0;
      size_t den = 0;
      switch (denom) {
        case OverlapDenom::jaccard:
          den = query_labels.size() + doc_labels.size() - inter;
          break;
        case OverlapDenom::query_size:
          den = query_labels.size();
          break;
        case OverlapDenom::min_size:
          den = std::min(query_labels.size(), doc_labels.size());
          break;
      }
      return static_cast<double>(inter) / static_cast<double>(den);
    }
  }
  return 0.0;
}

std::optional<double> average_precision(std::span<const double> ranked_rels,
                                        double threshold) {
  size_t total_relevant = 0;
  for (double r : ranked_rels)
    if (r > threshold) ++total_relevant;
  if (total_relevant == 0) return std::nullopt;
  double sum = 0.0;
  size_t hits = 0;
  for (size_t i = 0; i < ranked_rels.size(); ++i) {
    if (ranked_rels[i] > threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double dcg_at_k(std::span<const double> ranked_rels, size_t k) {
  if (k < 1) throw std::invalid_argument("ndcg: k must be >= 1");
  size_t n = std::min(k, ranked_rels.size());
  if (n == 0) return 0.0;
  double dcg = ranked_rels[0];
  for (size_t i = 2; i <= n; ++i)
    dcg += ranked_rels[i - 1] / std::log2(static_cast<double>(i));
  return dcg;
}

double ndcg_at_k(std::span<const double> ranked_rels, std::span<const double> all_rels,
                 size_t k) {
  std::vector<double> ideal(all_rels.begin(), all_rels.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<double>());
  double denom = dcg_at_k(ideal, k);
  if (denom <= 0.0) return 0.0;
  return dcg_at_k(ranked_rels, k) / denom;
}

MapResult mean_average_precision(const std::vector<std::vector<double>>& per_query_rels,
                                 double threshold) {
  MapResult res;
  double sum = 0.0;
  for (const auto& rels : per_query_rels) {
    auto ap = average_precision(rels, threshold);
    if (ap) {
      sum += *ap;
      ++res.queries_used;
    } else {
      ++res.queries_skipped;
    }
  }
  res.map = res.queries_used ? sum / static_cast<double>(res.queries_used) : 0.0;
  return res;
}

PrCurve precision_recall_curve(const std::vector<std::vector<double>>& per_query_rels,
                               size_t levels, double threshold) {
  if (levels < 1) throw std::invalid_argument("precision_recall_curve: levels must be >= 1");
  PrCurve curve;
  curve.recall.resize(levels);
  curve.precision.assign(levels, 0.0);
  for (size_t j = 0; j < levels; ++j)
    curve.recall[j] = static_cast<double>(j + 1) / static_cast<double>(levels);

  for (const auto& rels : per_query_rels) {
    // position (1-based) of the h-th relevant document
    std::vector<size_t> hit_pos;
    for (size_t i = 0; i < rels.size(); ++i)
      if (rels[i] > threshold) hit_pos.push_back(i + 1);
    if (hit_pos.empty()) {
      ++curve.queries_skipped;
      continue;
    }
    ++curve.queries_used;
    double total = static_cast<double>(hit_pos.size());
    for (size_t j = 0; j < levels; ++j) {
      // first hit count h with h/total >= recall level
      auto h = static_cast<size_t>(std::ceil(curve.recall[j] * total - 1e-12));
      if (h < 1) h = 1;
      if (h > hit_pos.size()) h = hit_pos.size();  // guard fp edge at recall 1.0
      curve.precision[j] += static_cast<double>(h) / static_cast<double>(hit_pos[h - 1]);
    }
  }
  if (curve.queries_used > 0)
    for (auto& p : curve.precision) p /= static_cast<double>(curve.queries_used);
  return curve;
}

}  // namespace textvec::evalir
