#include "textvec/evalir/evaluate.hpp"

#include <algorithm>
#include <thread>

#include "textvec/common.hpp"

namespace textvec::evalir {

std::vector<uint32_t> select_queries(size_t num_docs, double fraction, uint64_t seed) {
  std::vector<uint32_t> ids(num_docs);
  for (size_t i = 0; i < num_docs; ++i) ids[i] = static_cast<uint32_t>(i);
  if (fraction >= 1.0) return ids;
  if (fraction <= 0.0) throw std::invalid_argument("query sample fraction must be positive");
  size_t keep = std::max<size_t>(1, static_cast<size_t>(fraction * static_cast<double>(num_docs)));
  Rng rng(derive_seed(seed, 0x9e3779b9ULL));
  for (size_t i = 0; i < keep; ++i) {
    size_t j = i + static_cast<size_t>(rng.uniform_int(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(keep);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

// Ranks every query (in parallel), judges relevances in ranked order, then
// aggregates. rank_fn(query_doc) must return the full ranking excluding the
// query itself.
template <typename RankFn>
EvalReport run_eval(size_t num_docs, const corpus::LabelTable& labels, const EvalConfig& config,
                    const RankFn& rank_fn) {
  auto queries = select_queries(num_docs, config.query_sample, config.sample_seed);
  RelevanceJudge judge{config.judge, config.overlap_denom};

  std::vector<std::vector<double>> rels(queries.size());
  int workers = std::max(1, config.workers);
  auto work = [&](size_t begin, size_t end) {
    for (size_t qi = begin; qi < end; ++qi) {
      uint32_t q = queries[qi];
      auto ranked = rank_fn(q);
      auto qlabels = labels.labels_of(q);
      auto& out = rels[qi];
      out.resize(ranked.size());
      for (size_t i = 0; i < ranked.size(); ++i)
        out[i] = judge(qlabels, labels.labels_of(ranked[i].doc));
    }
  };
  if (workers == 1 || queries.size() < 2) {
    work(0, queries.size());
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (queries.size() + workers - 1) / static_cast<size_t>(workers);
    for (int w = 0; w < workers; ++w) {
      size_t begin = std::min(queries.size(), static_cast<size_t>(w) * chunk);
      size_t end = std::min(queries.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  auto map = mean_average_precision(rels, config.relevance_threshold);
  report.map = map.map;
  report.queries_used = map.queries_used;
  report.queries_skipped = map.queries_skipped;

  double ndcg_sum = 0.0;
  size_t ndcg_n = 0;
  for (const auto& r : rels) {
    bool any = std::any_of(r.begin(), r.end(),
                           [&](double x) { return x > config.relevance_threshold; });
    if (!any) continue;  // skipped consistently with MAP
    ndcg_sum += ndcg_at_k(std::span<const double>(r), std::span<const double>(r),
                          static_cast<size_t>(config.ndcg_k));
    ++ndcg_n;
  }
  report.ndcg = ndcg_n > 0 ? ndcg_sum / static_cast<double>(ndcg_n) : 0.0;

  report.curve = precision_recall_curve(rels, static_cast<size_t>(config.pr_levels),
                                        config.relevance_threshold);
  return report;
}

}  // namespace

EvalReport evaluate_codes(const std::vector<binarize::BinaryCode>& codes,
                          const corpus::LabelTable& labels, const EvalConfig& config) {
  return run_eval(codes.size(), labels, config, [&](uint32_t q) {
    return rank_by_hamming(codes[q], codes, q);
  });
}

EvalReport evaluate_vectors(const nncore::Matrix<float>& vectors,
                            const corpus::LabelTable& labels, const EvalConfig& config) {
  std::vector<std::vector<double>> rows(static_cast<size_t>(vectors.rows));
  for (int64_t r = 0; r < vectors.rows; ++r) {
    auto src = vectors.row(r);
    rows[static_cast<size_t>(r)].assign(src.begin(), src.end());
  }
  return run_eval(rows.size(), labels, config, [&](uint32_t q) {
    return rank_by_cosine(std::span<const double>(rows[q]), rows, q);
  });
}

}  // namespace textvec::evalir
