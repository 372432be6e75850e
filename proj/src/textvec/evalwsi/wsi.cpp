#include "textvec/evalwsi/wsi.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "textvec/evalwsi/ari.hpp"
#include "textvec/evalwsi/spearman.hpp"
#include "textvec/nncore/scalar.hpp"

namespace textvec::evalwsi {

namespace {

std::vector<uint32_t> encode_unigrams(const corpus::Vocabulary& vocab,
                                      const std::vector<std::string>& tokens) {
  std::vector<uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto id = vocab.id(t);
    if (id.has_value() && *id < vocab.unigram_count()) ids.push_back(*id);
  }
  return ids;
}

void posterior_or_marginals(const dsg::SenseModel<float>& model, uint32_t word,
                            std::span<const uint32_t> ctx, std::vector<float>& p) {
  p.assign(model.k, 0.0f);
  if (ctx.empty()) {
    auto row = model.marginals.row(word);
    std::copy(row.begin(), row.end(), p.begin());
    return;
  }
  std::vector<float> rbar(static_cast<size_t>(model.d));
  dsg::context_vector(model, ctx, std::span<float>(rbar));
  dsg::sense_posterior(model, word, std::span<const float>(rbar), std::span<float>(p));
}

double sense_cosine(const dsg::SenseModel<float>& model, uint32_t w1, uint32_t s1, uint32_t w2,
                    uint32_t s2) {
  auto a = model.sense(w1, s1);
  auto b = model.sense(w2, s2);
  double na = nncore::norm(a), nb = nncore::norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return nncore::dot(a, b) / (na * nb);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

double avg_sim_c(const dsg::SenseModel<float>& model, uint32_t w1,
                 std::span<const uint32_t> ctx1, uint32_t w2, std::span<const uint32_t> ctx2) {
  std::vector<float> p1, p2;
  posterior_or_marginals(model, w1, ctx1, p1);
  posterior_or_marginals(model, w2, ctx2, p2);
  double sim = 0.0;
  for (uint32_t s1 = 0; s1 < model.k; ++s1)
    for (uint32_t s2 = 0; s2 < model.k; ++s2)
      sim += static_cast<double>(p1[s1]) * p2[s2] * sense_cosine(model, w1, s1, w2, s2);
  return sim;
}

double max_sim_c(const dsg::SenseModel<float>& model, uint32_t w1,
                 std::span<const uint32_t> ctx1, uint32_t w2, std::span<const uint32_t> ctx2) {
  std::vector<float> p1, p2;
  posterior_or_marginals(model, w1, ctx1, p1);
  posterior_or_marginals(model, w2, ctx2, p2);
  auto arg = [](const std::vector<float>& p) {
    uint32_t best = 0;
    for (uint32_t s = 1; s < p.size(); ++s)
      if (p[s] > p[best]) best = s;
    return best;
  };
  return sense_cosine(model, w1, arg(p1), w2, arg(p2));
}

double avg_sim(const dsg::SenseModel<float>& model, uint32_t w1, uint32_t w2) {
  double sim = 0.0;
  for (uint32_t s1 = 0; s1 < model.k; ++s1)
    for (uint32_t s2 = 0; s2 < model.k; ++s2) sim += sense_cosine(model, w1, s1, w2, s2);
  return sim / (static_cast<double>(model.k) * model.k);
}

WsiDataset load_wsi_dataset(const std::string& path, WsiFormat,
                            const corpus::PreprocessConfig& config) {
  auto in = open_input(path);
  WsiDataset out;
  std::string line;
  size_t lineno = 0;
  std::map<std::string, size_t> per_target;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      ++out.malformed;
      continue;
    }
    WsiInstance inst;
    inst.target = fields[0];
    inst.gold = fields[1];
    inst.context = corpus::preprocess_text(fields[2], config);
    inst.id = inst.target + "." + std::to_string(per_target[inst.target]++);
    out.instances.push_back(std::move(inst));
  }
  return out;
}

SimilarityDataset load_similarity_dataset(const std::string& path, SimilarityFormat format,
                                          const corpus::PreprocessConfig& config) {
  auto in = open_input(path);
  SimilarityDataset out;
  std::string line;
  size_t expected = format == SimilarityFormat::wordsim ? 3u : 5u;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != expected || fields[0].empty()) {
      ++out.malformed;
      continue;
    }
    SimilarityPair pair;
    pair.w1 = fields[0];
    try {
      if (format == SimilarityFormat::wordsim) {
        if (fields[1].empty()) throw std::invalid_argument("empty");
        pair.w2 = fields[1];
        size_t used = 0;
        pair.gold = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("trailing garbage");
      } else {
        if (fields[2].empty()) throw std::invalid_argument("empty");
        pair.ctx1 = corpus::preprocess_text(fields[1], config);
        pair.w2 = fields[2];
        pair.ctx2 = corpus::preprocess_text(fields[3], config);
        size_t used = 0;
        pair.gold = std::stod(fields[4], &used);
        if (used != fields[4].size()) throw std::invalid_argument("trailing garbage");
      }
    } catch (const std::exception&) {
      ++out.malformed;
      continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

WsiScore score_wsi(const dsg::SenseModel<float>& model, const corpus::Vocabulary& vocab,
                   const std::vector<WsiInstance>& instances, bool pooled) {
  struct Scored {
    uint32_t pred;
    std::string gold;
  };
  std::map<std::string, std::vector<Scored>> by_target;
  WsiScore score;
  for (const auto& inst : instances) {
    auto target = vocab.id(inst.target);
    if (!target.has_value() || *target >= vocab.unigram_count()) {
      ++score.targets_oov;
      continue;
    }
    auto ctx = encode_unigrams(vocab, inst.context);
    auto res = disambiguate(model, *target, std::span<const uint32_t>(ctx));
    if (res.marginal_fallback) ++score.marginal_fallbacks;
    by_target[inst.target].push_back({res.sense, inst.gold});
    ++score.instances_used;
  }

  auto ari_of = [](const std::vector<Scored>& group) {
    std::vector<uint32_t> pred, gold;
    std::map<std::string, uint32_t> gold_ids;
    for (const auto& s : group) {
      pred.push_back(s.pred);
      auto [it, _] = gold_ids.emplace(s.gold, static_cast<uint32_t>(gold_ids.size()));
      gold.push_back(it->second);
    }
    return adjusted_rand_index(std::span<const uint32_t>(pred), std::span<const uint32_t>(gold));
  };

  if (by_target.empty()) return score;
  if (pooled) {
    // Disambiguation indices are only meaningful within one target word, so
    // offset each word's senses into a disjoint label range before pooling.
    std::vector<Scored> all;
    uint32_t offset = 0;
    for (const auto& [target, group] : by_target) {
      for (const auto& s : group) all.push_back({s.pred + offset, target + "\t" + s.gold});
      offset += model.k;
    }
    score.ari = ari_of(all);
    score.words_scored = by_target.size();
  } else {
    double total = 0.0;
    for (const auto& [target, group] : by_target) total += ari_of(group);
    score.ari = total / static_cast<double>(by_target.size());
    score.words_scored = by_target.size();
  }
  return score;
}

SimilarityScore score_similarity(const dsg::SenseModel<float>& model,
                                 const corpus::Vocabulary& vocab,
                                 const std::vector<SimilarityPair>& pairs,
                                 SimilarityMetric metric) {
  std::vector<double> pred, gold;
  SimilarityScore out;
  for (const auto& pair : pairs) {
    auto id1 = vocab.id(pair.w1);
    auto id2 = vocab.id(pair.w2);
    if (!id1.has_value() || *id1 >= vocab.unigram_count() || !id2.has_value() ||
        *id2 >= vocab.unigram_count()) {
      ++out.pairs_skipped;
      continue;
    }
    auto ctx1 = encode_unigrams(vocab, pair.ctx1);
    auto ctx2 = encode_unigrams(vocab, pair.ctx2);
    double s = 0.0;
    switch (metric) {
      case SimilarityMetric::avg_sim_c:
        s = avg_sim_c(model, *id1, std::span<const uint32_t>(ctx1), *id2,
                      std::span<const uint32_t>(ctx2));
        break;
      case SimilarityMetric::max_sim_c:
        s = max_sim_c(model, *id1, std::span<const uint32_t>(ctx1), *id2,
                      std::span<const uint32_t>(ctx2));
        break;
      case SimilarityMetric::avg_sim:
        s = avg_sim(model, *id1, *id2);
        break;
    }
    pred.push_back(s);
    gold.push_back(pair.gold);
  }
  out.pairs_used = pred.size();
  if (pred.size() >= 2) {
    try {
      out.spearman = spearman(std::span<const double>(pred), std::span<const double>(gold));
    } catch (const std::exception&) {
      out.spearman = 0.0;  // constant predictions: correlation undefined
    }
  }
  return out;
}

}  // namespace textvec::evalwsi
