#pragma once

// Sense disambiguation on benchmark contexts plus contextual word-similarity
// scoring. Works against a trained SenseModel and its vocabulary.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "textvec/corpus/preprocess.hpp"
#include "textvec/corpus/vocabulary.hpp"
#include "textvec/dsg/model.hpp"

namespace textvec::evalwsi {

struct WsiInstance {
  std::string target;
  std::vector<std::string> context;  // preprocessed tokens
  std::string gold;
  std::string id;
};

struct SimilarityPair {
  std::string w1, w2;
  std::vector<std::string> ctx1, ctx2;  // empty for context-free datasets
  double gold = 0.0;
};

struct DisambigResult {
  uint32_t sense = 0;
  bool marginal_fallback = false;  // no usable context; argmax of marginals
};

// Context representation: mean over every sense embedding of every context
// word (the 1/(k * #C) constant is kept even though the cosine argmax does
// not depend on it). Returns the active sense with the largest cosine to it;
// ties go to the lowest index.
template <typename T>
DisambigResult disambiguate(const dsg::SenseModel<T>& model, uint32_t target,
                            std::span<const uint32_t> context) {
  if (target >= model.vocab()) throw std::out_of_range("target word id out of range");
  if (context.empty()) {
    auto row = model.marginals.row(target);
    uint32_t best = 0;
    for (uint32_t s = 1; s < model.k; ++s)
      if (row[s] > row[best]) best = s;
    return {best, true};
  }
  std::vector<double> cbar(static_cast<size_t>(model.d), 0.0);
  for (uint32_t c : context)
    for (uint32_t s = 0; s < model.k; ++s) {
      auto v = model.sense(c, s);
      for (size_t i = 0; i < cbar.size(); ++i) cbar[i] += static_cast<double>(v[i]);
    }
  double inv = 1.0 / (static_cast<double>(model.k) * static_cast<double>(context.size()));
  for (double& x : cbar) x *= inv;

  double cnorm = 0.0;
  for (double x : cbar) cnorm += x * x;
  cnorm = std::sqrt(cnorm);
  uint32_t best = 0;
  double best_score = 0.0;
  bool found = false;
  for (uint32_t s = 0; s < model.k; ++s) {
    if (!model.sense_active(target, s)) continue;
    auto v = model.sense(target, s);
    double dot = 0.0, vnorm = 0.0;
    for (size_t i = 0; i < cbar.size(); ++i) {
      dot += cbar[i] * static_cast<double>(v[i]);
      vnorm += static_cast<double>(v[i]) * v[i];
    }
    vnorm = std::sqrt(vnorm);
    double score = (cnorm == 0.0 || vnorm == 0.0) ? 0.0 : dot / (cnorm * vnorm);
    if (!found || score > best_score) {
      best = s;
      best_score = score;
      found = true;
    }
  }
  return {best, false};
}

// Posterior-weighted mean cosine over all k^2 sense pairs (weights from the
// model posterior given each word's context).
double avg_sim_c(const dsg::SenseModel<float>& model, uint32_t w1,
                 std::span<const uint32_t> ctx1, uint32_t w2, std::span<const uint32_t> ctx2);

// Cosine between the two argmax-posterior senses (ties: lowest index).
double max_sim_c(const dsg::SenseModel<float>& model, uint32_t w1,
                 std::span<const uint32_t> ctx1, uint32_t w2, std::span<const uint32_t> ctx2);

// Unweighted mean cosine over all k^2 sense pairs; ignores pruning.
double avg_sim(const dsg::SenseModel<float>& model, uint32_t w1, uint32_t w2);

// ---------------------------------------------------------------------------

enum class WsiFormat { semeval, wwsi_tsv };
enum class SimilarityFormat { wordsim, scws };

struct WsiDataset {
  std::vector<WsiInstance> instances;
  size_t malformed = 0;
};
struct SimilarityDataset {
  std::vector<SimilarityPair> pairs;
  size_t malformed = 0;
};

// TSV: target <TAB> gold_label <TAB> context text. Context text runs through
// the corpus preprocessing pipeline (pass the training-time config).
WsiDataset load_wsi_dataset(const std::string& path, WsiFormat format,
                            const corpus::PreprocessConfig& config = {});

// wordsim TSV: w1 <TAB> w2 <TAB> score
// scws TSV:    w1 <TAB> ctx1 <TAB> w2 <TAB> ctx2 <TAB> score
SimilarityDataset load_similarity_dataset(const std::string& path, SimilarityFormat format,
                                          const corpus::PreprocessConfig& config = {});

// ---------------------------------------------------------------------------

struct WsiScore {
  double ari = 0.0;
  size_t words_scored = 0;       // macro mode: words entering the average
  size_t instances_used = 0;
  size_t targets_oov = 0;        // instances dropped: target not in vocabulary
  size_t marginal_fallbacks = 0; // instances with no in-vocab context
};

// Disambiguates every instance and scores against gold labels. Macro mode
// (default) computes ARI per target word and averages; pooled mode computes
// one ARI over all instances.
WsiScore score_wsi(const dsg::SenseModel<float>& model, const corpus::Vocabulary& vocab,
                   const std::vector<WsiInstance>& instances, bool pooled = false);

enum class SimilarityMetric { avg_sim_c, max_sim_c, avg_sim };

struct SimilarityScore {
  double spearman = 0.0;
  size_t pairs_used = 0;
  size_t pairs_skipped = 0;  // OOV word or unusable context
};

SimilarityScore score_similarity(const dsg::SenseModel<float>& model,
                                 const corpus::Vocabulary& vocab,
                                 const std::vector<SimilarityPair>& pairs,
                                 SimilarityMetric metric);

}  // namespace textvec::evalwsi
