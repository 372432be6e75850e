#include "textvec/evalir/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace textvec::evalir {

using binarize::BinaryCode;
using binarize::hamming_distance;

double ranking_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

void sort_ascending_score(RankedList& list) {
  std::sort(list.begin(), list.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.doc < b.doc;
  });
}

void sort_descending_score(RankedList& list) {
  std::sort(list.begin(), list.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc < b.doc;
  });
}

}  // namespace

RankedList rank_by_hamming(const BinaryCode& query, const std::vector<BinaryCode>& codes,
                           std::optional<uint32_t> exclude_doc) {
  RankedList list;
  list.reserve(codes.size());
  for (uint32_t d = 0; d < codes.size(); ++d) {
    if (exclude_doc && *exclude_doc == d) continue;
    list.push_back({d, static_cast<double>(hamming_distance(query, codes[d]))});
  }
  sort_ascending_score(list);
  return list;
}

RankedList rank_by_cosine(std::span<const double> query,
                          const std::vector<std::vector<double>>& vectors,
                          std::optional<uint32_t> exclude_doc) {
  RankedList list;
  list.reserve(vectors.size());
  for (uint32_t d = 0; d < vectors.size(); ++d) {
    if (exclude_doc && *exclude_doc == d) continue;
    list.push_back({d, ranking_cosine(query, vectors[d])});
  }
  sort_descending_score(list);
  return list;
}

RankedList two_stage_search(const BinaryCode& query_code, std::span<const double> query_real,
                            const HammingIndex& index,
                            const std::vector<std::vector<double>>& vectors, uint32_t radius,
                            std::optional<uint32_t> exclude_doc) {
  if (vectors.size() != index.size())
    throw std::invalid_argument("two_stage_search: binary and real code counts differ");
  RankedList list;
  for (uint32_t d : index.within_radius(query_code, radius)) {
    if (exclude_doc && *exclude_doc == d) continue;
    list.push_back({d, ranking_cosine(query_real, vectors[d])});
  }
  sort_descending_score(list);
  return list;
}

}  // namespace textvec::evalir
