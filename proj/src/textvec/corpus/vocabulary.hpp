#pragma once

// N-gram vocabulary with dense ids. Unigrams occupy ids [0, unigram_count),
// bigrams follow; inside each block ids go by descending frequency, ties by
// surface byte order. That layout keeps every encoded token id below the
// unigram count while still giving deterministic, frequency-ranked ids.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace textvec::corpus {

struct Term {
  std::string surface;
  uint8_t order = 1;  // 1 = unigram, 2 = bigram
  uint64_t freq = 0;
};

// Separator for bigram surfaces; never occurs inside a preprocessed token.
inline constexpr char kBigramSep = '\x1f';

inline std::string bigram_surface(const std::string& a, const std::string& b) {
  std::string s;
  s.reserve(a.size() + b.size() + 1);
  s += a;
  s += kBigramSep;
  s += b;
  return s;
}

class Vocabulary {
 public:
  Vocabulary() = default;
  // terms must already satisfy the block/order layout; used by builders/IO.
  explicit Vocabulary(std::vector<Term> terms);

  size_t size() const { return terms_.size(); }
  size_t unigram_count() const { return unigram_count_; }
  bool empty() const { return terms_.empty(); }

  const Term& term(uint32_t id) const { return terms_.at(id); }
  std::optional<uint32_t> id(const std::string& surface) const;
  bool contains(const std::string& surface) const { return id(surface).has_value(); }

  std::vector<uint64_t> frequencies() const;

  // FNV-1a over (surface, order, freq) triples in id order; stored in model
  // files to detect mismatched vocabularies at load time.
  uint64_t content_hash() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string, uint32_t> term_to_id_;
  size_t unigram_count_ = 0;
};

// Streaming counter; workers count disjoint document ranges and merge.
class VocabCounter {
 public:
  explicit VocabCounter(bool include_bigrams) : include_bigrams_(include_bigrams) {}

  void add_document(const std::vector<std::string>& tokens);
  void merge(const VocabCounter& other);

  // Applies min_count, then the optional global max_terms cap (most frequent
  // kept, ties by surface byte order), then fixes the id layout.
  Vocabulary build(uint64_t min_count, std::optional<size_t> max_terms = std::nullopt) const;

  bool include_bigrams() const { return include_bigrams_; }

 private:
  bool include_bigrams_;
  std::unordered_map<std::string, uint64_t> unigrams_;
  std::unordered_map<std::string, uint64_t> bigrams_;
};

}  // namespace textvec::corpus
