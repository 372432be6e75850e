#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textvec/corpus/vocabulary.hpp"
#include "textvec/dsg/model.hpp"

namespace textvec::dsg {

struct SenseNeighbor {
  uint32_t word = 0;
  uint32_t sense = 0;
  double score = 0.0;
};

// Nearest neighbors of sense (word, sense) by cosine over sense embeddings.
// Only active senses of other words are candidates; with merge_senses, each
// word contributes only its best-scoring sense. Ties: score desc, then word
// asc, then sense asc.
std::vector<SenseNeighbor> nearest_senses(const SenseModel<float>& model, uint32_t word,
                                          uint32_t sense, size_t count,
                                          bool merge_senses = false);

size_t edit_distance(const std::string& a, const std::string& b);

// Closest vocabulary surfaces by edit distance (ties: distance asc, surface
// asc). Used for "unknown word" error messages.
std::vector<std::string> closest_spellings(const corpus::Vocabulary& vocab,
                                           const std::string& word, size_t count = 5);

// Resolves a surface form to its id or throws with spelling suggestions.
uint32_t require_word(const corpus::Vocabulary& vocab, const std::string& word);

}  // namespace textvec::dsg
