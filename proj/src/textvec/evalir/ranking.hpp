#pragma once

// Candidate ranking by Hamming distance or cosine similarity, plus the
// two-stage (Hamming filter, cosine re-rank) search. Ties always break by
// ascending doc id so output is independent of input order.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "textvec/binarize/binary_code.hpp"
#include "textvec/evalir/hamming_index.hpp"

namespace textvec::evalir {

struct RankedItem {
  uint32_t doc = 0;
  double score = 0.0;  // Hamming distance (ascending) or cosine (descending)
};
using RankedList = std::vector<RankedItem>;

// Cosine with the ranking convention that a zero vector has similarity 0 to
// everything (such documents sink to the bottom deterministically).
double ranking_cosine(std::span<const double> a, std::span<const double> b);

RankedList rank_by_hamming(const binarize::BinaryCode& query,
                           const std::vector<binarize::BinaryCode>& codes,
                           std::optional<uint32_t> exclude_doc = std::nullopt);

RankedList rank_by_cosine(std::span<const double> query,
                          const std::vector<std::vector<double>>& vectors,
                          std::optional<uint32_t> exclude_doc = std::nullopt);

// Hamming-ball candidate filter on binary codes, then cosine ranking on the
// real vectors of the surviving candidates.
RankedList two_stage_search(const binarize::BinaryCode& query_code,
                            std::span<const double> query_real, const HammingIndex& index,
                            const std::vector<std::vector<double>>& vectors, uint32_t radius,
                            std::optional<uint32_t> exclude_doc = std::nullopt);

}  // namespace textvec::evalir
