#pragma once

// End-to-end retrieval evaluation: treat (all or a sample of) documents as
// queries, rank every other document, judge relevances, and aggregate MAP,
// NDCG@k, and the averaged precision-recall curve.

#include <cstdint>
#include <vector>

#include "textvec/binarize/binary_code.hpp"
#include "textvec/corpus/labels.hpp"
#include "textvec/evalir/metrics.hpp"
#include "textvec/evalir/ranking.hpp"
#include "textvec/nncore/matrix.hpp"

namespace textvec::evalir {

struct EvalConfig {
  JudgeKind judge = JudgeKind::exact_label;
  OverlapDenom overlap_denom = OverlapDenom::jaccard;
  double relevance_threshold = 0.0;  // binarization for MAP / PR hits
  int ndcg_k = 10;
  double query_sample = 1.0;  // fraction of docs used as queries
  uint64_t sample_seed = 1;
  int pr_levels = 200;
  int workers = 1;
};

struct EvalReport {
  double map = 0.0;
  double ndcg = 0.0;
  PrCurve curve;
  size_t queries_used = 0;
  size_t queries_skipped = 0;  // zero relevant documents under the judge
};

// Chooses the query set: all docs when sample >= 1, otherwise a seeded sample
// without replacement (ascending ids for reproducible iteration).
std::vector<uint32_t> select_queries(size_t num_docs, double fraction, uint64_t seed);

// Hamming ranking over binary codes.
EvalReport evaluate_codes(const std::vector<binarize::BinaryCode>& codes,
                          const corpus::LabelTable& labels, const EvalConfig& config);

// Cosine ranking over real vectors (one row per doc).
EvalReport evaluate_vectors(const nncore::Matrix<float>& vectors,
                            const corpus::LabelTable& labels, const EvalConfig& config);

}  // namespace textvec::evalir
