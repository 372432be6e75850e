#pragma once

// Retrieval metrics over per-query relevance sequences (candidate relevances
// in ranked order). Relevance judging from label sets lives here too.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace textvec::evalir {

// --- relevance judges ---------------------------------------------------------

enum class JudgeKind {
  exact_label,       // label sets equal and nonempty -> 1
  overlap_fraction,  // |intersection| / denominator in [0,1]
  shared_category,   // intersection nonempty -> 1
};

enum class OverlapDenom { jaccard, query_size, min_size };

struct RelevanceJudge {
  JudgeKind kind = JudgeKind::exact_label;
  OverlapDenom denom = OverlapDenom::jaccard;

  // Label id vectors must be sorted ascending.
  double operator()(std::span<const uint32_t> query_labels,
                    std::span<const uint32_t> doc_labels) const;
};

// --- per-query metrics ---------------------------------------------------------

// AP = sum over relevant hits of precision@hit / (number of relevant docs).
// Graded relevances count as relevant when > threshold. nullopt when the query
// has no relevant candidate.
std::optional<double> average_precision(std::span<const double> ranked_rels,
                                        double threshold = 0.0);

// DCG@k = r_1 + sum_{i=2..k} r_i / log2(i).
double dcg_at_k(std::span<const double> ranked_rels, size_t k);

// Ideal DCG uses the descending sort of `all_rels` (the full candidate set's
// relevances). All-zero relevance -> 0 by convention.
double ndcg_at_k(std::span<const double> ranked_rels, std::span<const double> all_rels,
                 size_t k);

// --- aggregates over queries ---------------------------------------------------

struct MapResult {
  double map = 0.0;
  size_t queries_used = 0;
  size_t queries_skipped = 0;  // no relevant candidates
};

MapResult mean_average_precision(const std::vector<std::vector<double>>& per_query_rels,
                                 double threshold = 0.0);

struct PrCurve {
  std::vector<double> recall;     // (j+1)/levels for j = 0..levels-1
  std::vector<double> precision;  // averaged over usable queries
  size_t queries_used = 0;
  size_t queries_skipped = 0;
};

// For each recall level, each query's ranking is cut at the first position
// reaching that recall; precision there is averaged over queries.
PrCurve precision_recall_curve(const std::vector<std::vector<double>>& per_query_rels,
                               size_t levels = 200, double threshold = 0.0);

}  // namespace textvec::evalir
