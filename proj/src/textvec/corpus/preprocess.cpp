#include "textvec/corpus/preprocess.hpp"

#include <cctype>
#include <fstream>

#include "textvec/common.hpp"

namespace textvec::corpus {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool all_digits(const std::string& t) {
  for (char c : t)
    if (c < '0' || c > '9') return false;
  return !t.empty();
}

}  // namespace

std::vector<std::string> preprocess_text(std::string_view raw, const PreprocessConfig& cfg) {
  std::vector<std::string> out;
  const size_t num_len = 5;  // strlen("<num>")
  std::string tok;
  size_t i = 0;
  while (i < raw.size()) {
    // A literal "<num>" survives as a token so preprocessing already-collapsed
    // text reproduces itself. It must end at a token boundary: "<number>" is
    // just the word "number".
    if (cfg.collapse_numbers && raw.compare(i, num_len, kNumToken) == 0 &&
        (i + num_len >= raw.size() ||
         !is_token_byte(static_cast<unsigned char>(raw[i + num_len])))) {
      out.emplace_back(kNumToken);
      i += num_len;
      continue;
    }
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (!is_token_byte(c)) {
      ++i;
      continue;
    }
    tok.clear();
    while (i < raw.size() && is_token_byte(static_cast<unsigned char>(raw[i]))) {
      tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
      ++i;
    }
    if (tok.size() < cfg.min_token_len || tok.size() > cfg.max_token_len) continue;
    if (cfg.stopwords.count(tok)) continue;
    if (cfg.collapse_numbers && all_digits(tok)) {
      out.emplace_back(kNumToken);
      continue;
    }
    out.push_back(tok);
  }
  return out;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream f = open_input(path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                             line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

}  // namespace textvec::corpus
