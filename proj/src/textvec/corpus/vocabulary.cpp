#include "textvec/corpus/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "textvec/common.hpp"

namespace textvec::corpus {

Vocabulary::Vocabulary(std::vector<Term> terms) : terms_(std::move(terms)) {
  term_to_id_.reserve(terms_.size());
  for (uint32_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].order == 1) {
      if (i != unigram_count_)
        throw std::invalid_argument("vocabulary terms are not in unigram-first layout");
      ++unigram_count_;
    }
    auto [it, fresh] = term_to_id_.emplace(terms_[i].surface, i);
    if (!fresh) throw std::invalid_argument("duplicate term surface: " + terms_[i].surface);
  }
}

std::optional<uint32_t> Vocabulary::id(const std::string& surface) const {
  auto it = term_to_id_.find(surface);
  if (it == term_to_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<uint64_t> Vocabulary::frequencies() const {
  std::vector<uint64_t> f(terms_.size());
  for (size_t i = 0; i < terms_.size(); ++i) f[i] = terms_[i].freq;
  return f;
}

uint64_t Vocabulary::content_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const Term& t : terms_) {
    h = fnv1a(t.surface.data(), t.surface.size(), h);
    h = fnv1a(&t.order, sizeof(t.order), h);
    h = fnv1a(&t.freq, sizeof(t.freq), h);
  }
  return h;
}

// TSV: surface TAB order TAB freq. Bigram surfaces keep the raw separator
// byte; the file is a machine artifact, not for hand editing.
void Vocabulary::save(const std::string& path) const {
  std::ofstream f = open_output(path);
  for (const Term& t : terms_)
    f << t.surface << '\t' << int(t.order) << '\t' << t.freq << '\n';
  if (!f) throw std::runtime_error("failed writing vocabulary: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream f = open_input(path);
  std::vector<Term> terms;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw std::runtime_error(path + ": malformed vocabulary line " + std::to_string(line_no));
    Term t;
    t.surface = line.substr(0, t1);
    try {
      t.order = static_cast<uint8_t>(std::stoi(line.substr(t1 + 1, t2 - t1 - 1)));
      t.freq = std::stoull(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": malformed vocabulary line " + std::to_string(line_no));
    }
    terms.push_back(std::move(t));
  }
  return Vocabulary(std::move(terms));
}

void VocabCounter::add_document(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) ++unigrams_[t];
  if (include_bigrams_)
    for (size_t i = 0; i + 1 < tokens.size(); ++i)
      ++bigrams_[bigram_surface(tokens[i], tokens[i + 1])];
}

void VocabCounter::merge(const VocabCounter& other) {
  for (const auto& [k, v] : other.unigrams_) unigrams_[k] += v;
  for (const auto& [k, v] : other.bigrams_) bigrams_[k] += v;
}

Vocabulary VocabCounter::build(uint64_t min_count, std::optional<size_t> max_terms) const {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::vector<Term> all;
  all.reserve(unigrams_.size() + bigrams_.size());
  for (const auto& [s, f] : unigrams_)
    if (f >= min_count) all.push_back(Term{s, 1, f});
  for (const auto& [s, f] : bigrams_)
    if (f >= min_count) all.push_back(Term{s, 2, f});

  auto by_rank = [](const Term& a, const Term& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return a.surface < b.surface;
  };
  if (max_terms && all.size() > *max_terms) {
    std::sort(all.begin(), all.end(), by_rank);
    all.resize(*max_terms);
  }
  // unigram block first, then bigrams; rank order inside each block
  std::stable_sort(all.begin(), all.end(), [&](const Term& a, const Term& b) {
    if (a.order != b.order) return a.order < b.order;
    return by_rank(a, b);
  });
  return Vocabulary(std::move(all));
}

}  // namespace textvec::corpus
