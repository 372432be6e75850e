#include "textvec/dsg/queries.hpp"

#include <algorithm>
#include <stdexcept>

#include "textvec/nncore/scalar.hpp"

namespace textvec::dsg {

std::vector<SenseNeighbor> nearest_senses(const SenseModel<float>& model, uint32_t word,
                                          uint32_t sense, size_t count, bool merge_senses) {
  if (word >= model.vocab()) throw std::out_of_range("word id out of range");
  if (sense >= model.k) throw std::out_of_range("sense id out of range");
  auto anchor = model.sense(word, sense);
  double anorm = nncore::norm(anchor);
  if (anorm == 0.0) throw std::runtime_error("query sense has a zero embedding");

  std::vector<SenseNeighbor> all;
  for (uint32_t w = 0; w < model.vocab(); ++w) {
    if (w == word) continue;
    SenseNeighbor best;
    bool any = false;
    for (uint32_t s = 0; s < model.k; ++s) {
      if (!model.sense_active(w, s)) continue;
      auto v = model.sense(w, s);
      double vnorm = nncore::norm(v);
      double score = vnorm == 0.0 ? 0.0 : nncore::dot(anchor, v) / (anorm * vnorm);
      if (merge_senses) {
        if (!any || score > best.score) best = {w, s, score};
        any = true;
      } else {
        all.push_back({w, s, score});
      }
    }
    if (merge_senses && any) all.push_back(best);
  }
  std::sort(all.begin(), all.end(), [](const SenseNeighbor& a, const SenseNeighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.word != b.word) return a.word < b.word;
    return a.sense < b.sense;
  });
  if (all.size() > count) all.resize(count);
  return all;
}

size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> closest_spellings(const corpus::Vocabulary& vocab,
                                           const std::string& word, size_t count) {
  std::vector<std::pair<size_t, std::string>> scored;
  for (size_t id = 0; id < vocab.unigram_count(); ++id) {
    const auto& term = vocab.term(static_cast<uint32_t>(id));
    scored.emplace_back(edit_distance(word, term.surface), term.surface);
  }
  std::sort(scored.begin(), scored.end());
  if (scored.size() > count) scored.resize(count);
  std::vector<std::string> out;
  out.reserve(scored.size());
  for (auto& [dist, surface] : scored) out.push_back(surface);
  return out;
}

uint32_t require_word(const corpus::Vocabulary& vocab, const std::string& word) {
  auto id = vocab.id(word);
  if (id.has_value() && *id < vocab.unigram_count()) return *id;
  std::string msg = "unknown word '" + word + "'";
  auto near = closest_spellings(vocab, word, 5);
  if (!near.empty()) {
    msg += "; did you mean:";
    for (const auto& s : near) msg += " " + s;
  }
  throw std::runtime_error(msg);
}

}  // namespace textvec::dsg
