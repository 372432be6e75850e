#pragma once

// Text normalization: ASCII lowercasing, tokenization into alphanumeric runs,
// length/stopword filtering, optional collapsing of all-digit tokens into a
// <num> placeholder. Idempotent: re-preprocessing joined output is a no-op.

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace textvec::corpus {

inline constexpr const char* kNumToken = "<num>";

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  size_t min_token_len = 2;
  size_t max_token_len = 15;
  bool collapse_numbers = false;
};

std::vector<std::string> preprocess_text(std::string_view raw, const PreprocessConfig& cfg);

// Loads one stopword per line, already-lowercased words expected.
std::unordered_set<std::string> load_stopwords(const std::string& path);

}  // namespace textvec::corpus
