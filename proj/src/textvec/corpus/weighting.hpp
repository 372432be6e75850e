#pragma once

// Classic term-weighting utilities: sublinear TF, (smoothed) IDF. Natural log.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace textvec::corpus {

inline double tf_sublinear(uint64_t f_td) {
  return f_td > 0 ? 1.0 + std::log(static_cast<double>(f_td)) : 0.0;
}

inline double idf(uint64_t num_docs, uint64_t doc_freq) {
  if (doc_freq == 0) throw std::invalid_argument("idf: term occurs in no document");
  return std::log(static_cast<double>(num_docs) / static_cast<double>(doc_freq));
}

inline double idf_smoothed(uint64_t num_docs, uint64_t doc_freq) {
  if (doc_freq == 0) throw std::invalid_argument("idf: term occurs in no document");
  return std::log(1.0 + static_cast<double>(num_docs) / static_cast<double>(doc_freq));
}

inline double tf_idf(uint64_t f_td, uint64_t num_docs, uint64_t doc_freq, bool smoothed = false) {
  return tf_sublinear(f_td) *
         (smoothed ? idf_smoothed(num_docs, doc_freq) : idf(num_docs, doc_freq));
}

// n(t) per unigram id over already-encoded documents.
template <typename DocRange>
std::vector<uint64_t> document_frequencies(const DocRange& docs, size_t vocab_size) {
  std::vector<uint64_t> df(vocab_size, 0);
  std::vector<uint8_t> seen(vocab_size, 0);
  for (const auto& d : docs) {
    for (uint32_t id : d.token_ids)
      if (!seen[id]) {
        seen[id] = 1;
        ++df[id];
      }
    for (uint32_t id : d.token_ids) seen[id] = 0;
  }
  return df;
}

}  // namespace textvec::corpus
