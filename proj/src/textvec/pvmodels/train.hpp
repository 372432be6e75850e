#pragma once

// Training and inference loops for the paragraph-vector family. One record is
// one softmax prediction:
//
//   pvdbow      doc embedding -> dropout -> [coding layer] -> predict n-gram
//   realbinary  doc embedding -> dropout -> projection -> coding layer
//               -> predict n-gram (real code = the embedding itself)
//   pvdm        [doc part (dropout -> coding layer) || context word vectors]
//               -> predict center unigram
//
// Inference runs the identical loop over fresh document rows with everything
// except those rows frozen (softmax weights, bias, projection, word vectors).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "textvec/binarize/binary_code.hpp"
#include "textvec/corpus/examples.hpp"
#include "textvec/corpus/store.hpp"
#include "textvec/nncore/batching.hpp"
#include "textvec/nncore/sampled_softmax.hpp"
#include "textvec/nncore/sampler.hpp"
#include "textvec/pvmodels/model.hpp"

namespace textvec::pvmodels {

struct TrainConfig {
  uint64_t epochs = 10;
  double learning_rate = 0.3;
  size_t batch_size = 128;
  size_t negatives = 64;
  double dropout_keep = 1.0;  // inverted dropout on the document activation
  uint64_t seed = 1;
  int workers = 1;
  double adagrad_eps = 1e-8;
  std::optional<uint64_t> infer_epochs;  // default: same as epochs

  void validate() const {
    if (dropout_keep <= 0.0 || dropout_keep > 1.0)
      throw std::invalid_argument("dropout_keep must be in (0, 1]");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  }
};

template <typename T>
struct PvStepParams {
  double lr = 0.3;
  double dropout_keep = 1.0;
  double adagrad_eps = 1e-8;
  binarize::Phase phase = binarize::Phase::train;
  bool freeze_weights = false;
  const nncore::LogUniformSampler* sampler = nullptr;
  Rng* rng = nullptr;
  bool update = true;
};

template <typename T>
struct PvWorkspace {
  std::vector<T> hd, act, code, h, dcode, dact, dhd, dh0, dh, mask, dproj;
  nncore::SampledBatch batch;
  nncore::SampledSoftmax<T> ss;
  std::vector<size_t> order;  // candidate indices sorted by class id
  // pvdm: per-word gradient accumulation (a context word may repeat)
  std::unordered_map<uint32_t, size_t> word_slot;
  std::vector<uint32_t> word_ids;
  std::vector<std::vector<T>> word_grads;
};

namespace detail {

template <typename T>
void apply_dropout(std::span<const T> in, std::span<T> out, std::vector<T>& mask, double keep,
                   Rng& rng) {
  if (keep >= 1.0) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  mask.resize(in.size());
  nncore::fill_dropout_mask(std::span<T>(mask), static_cast<T>(keep), rng);
  for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] * mask[i];
}

// Sorted candidate order for deterministic weight-row updates.
inline void sorted_candidates(const std::vector<uint32_t>& cands, std::vector<size_t>& order) {
  order.resize(cands.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return cands[a] < cands[b]; });
}

template <typename T>
void update_output_rows(PvModel<T>& m, const PvWorkspace<T>& ws, std::span<const T> input,
                        T lr, T aeps) {
  std::vector<T> wgrad(input.size());
  for (size_t idx : ws.order) {
    uint32_t cls = ws.batch.candidates[idx];
    T c = ws.ss.coeff(idx);
    for (size_t i = 0; i < input.size(); ++i) wgrad[i] = c * input[i];
    nncore::adagrad_update_row(m.output_weights, cls, std::span<const T>(wgrad), lr, aeps);
    T bg = c;
    nncore::adagrad_update(std::span<T>(m.output_bias.row(cls)),
                           std::span<T>(m.output_bias.accum_row(cls)),
                           std::span<const T>(&bg, 1), lr, aeps);
  }
}

}  // namespace detail

// One DBOW or Real-Binary record. Returns the loss. With compute_grads the
// workspace retains dh0 (doc gradient), dproj, and the softmax state needed
// to reconstruct weight/bias gradients; prm.update controls whether they are
// applied.
template <typename T>
double pv_dbow_step(PvModel<T>& m, const corpus::DbowRecord& rec, const PvStepParams<T>& prm,
                    PvWorkspace<T>& ws, bool compute_grads = true) {
  const size_t d = static_cast<size_t>(m.doc_embeddings.cols);
  const bool projecting = m.kind == PvKind::realbinary;
  const size_t code_d = static_cast<size_t>(m.input_width());

  auto h0 = m.doc_embeddings.row(rec.doc);
  ws.hd.resize(d);
  detail::apply_dropout(std::span<const T>(h0), std::span<T>(ws.hd), ws.mask, prm.dropout_keep,
                        *prm.rng);

  ws.act.resize(code_d);
  if (projecting) {
    for (size_t j = 0; j < code_d; ++j) {
      T s = T(0);
      for (size_t i = 0; i < d; ++i) s += ws.hd[i] * m.projection.row(i)[j];
      ws.act[j] = s;
    }
  } else {
    std::copy(ws.hd.begin(), ws.hd.end(), ws.act.begin());
  }

  ws.code.resize(code_d);
  if (m.binarizer.active()) {
    m.binarizer.forward(std::span<const T>(ws.act), std::span<T>(ws.code), prm.phase, prm.rng);
  } else {
    std::copy(ws.act.begin(), ws.act.end(), ws.code.begin());
  }

  ws.batch.assemble(rec.target, prm.sampler->log_probability(rec.target), true);
  double loss =
      ws.ss.forward(std::span<const T>(ws.code), std::span<const uint32_t>(ws.batch.candidates),
                    m.output_weights, std::span<const T>(m.output_bias.values),
                    std::span<const double>(ws.batch.logq));
  if (!compute_grads) return loss;

  ws.dcode.assign(code_d, T(0));
  ws.ss.add_input_grad(std::span<const uint32_t>(ws.batch.candidates), m.output_weights,
                       std::span<T>(ws.dcode));

  ws.dact.resize(code_d);
  if (m.binarizer.active()) {
    m.binarizer.backward(std::span<const T>(ws.dcode), std::span<const T>(ws.act),
                         std::span<T>(ws.dact));
  } else {
    std::copy(ws.dcode.begin(), ws.dcode.end(), ws.dact.begin());
  }

  ws.dhd.resize(d);
  if (projecting) {
    ws.dproj.resize(d * code_d);
    for (size_t i = 0; i < d; ++i) {
      auto p = m.projection.row(i);
      T s = T(0);
      for (size_t j = 0; j < code_d; ++j) {
        s += p[j] * ws.dact[j];
        ws.dproj[i * code_d + j] = ws.hd[i] * ws.dact[j];
      }
      ws.dhd[i] = s;
    }
  } else {
    std::copy(ws.dact.begin(), ws.dact.end(), ws.dhd.begin());
  }

  ws.dh0.resize(d);
  if (prm.dropout_keep >= 1.0) {
    std::copy(ws.dhd.begin(), ws.dhd.end(), ws.dh0.begin());
  } else {
    for (size_t i = 0; i < d; ++i) ws.dh0[i] = ws.dhd[i] * ws.mask[i];
  }
  if (!prm.update) return loss;

  T lr = static_cast<T>(prm.lr);
  T aeps = static_cast<T>(prm.adagrad_eps);
  nncore::adagrad_update_row(m.doc_embeddings, rec.doc, std::span<const T>(ws.dh0), lr, aeps);
  if (!prm.freeze_weights) {
    if (projecting)
      nncore::adagrad_update(std::span<T>(m.projection.values), std::span<T>(m.projection.accum),
                             std::span<const T>(ws.dproj), lr, aeps);
    detail::sorted_candidates(ws.batch.candidates, ws.order);
    detail::update_output_rows(m, ws, std::span<const T>(ws.code), lr, aeps);
  }
  return loss;
}

// One DM record: concatenated [doc code || context word vectors] predicts the
// center unigram.
template <typename T>
double pv_dm_step(PvModel<T>& m, const corpus::DmRecord& rec, const PvStepParams<T>& prm,
                  PvWorkspace<T>& ws, bool compute_grads = true) {
  const size_t d_doc = static_cast<size_t>(m.doc_embeddings.cols);
  const size_t d_word = static_cast<size_t>(m.word_embeddings.cols);
  const size_t ctx_len = static_cast<size_t>(m.context_len());
  if (rec.context.size() != ctx_len)
    throw std::invalid_argument("record context length does not match the model window");
  const size_t h_len = d_doc + ctx_len * d_word;

  auto h0 = m.doc_embeddings.row(rec.doc);
  ws.hd.resize(d_doc);
  detail::apply_dropout(std::span<const T>(h0), std::span<T>(ws.hd), ws.mask, prm.dropout_keep,
                        *prm.rng);

  ws.h.resize(h_len);
  if (m.binarizer.active()) {
    m.binarizer.forward(std::span<const T>(ws.hd), std::span<T>(ws.h).subspan(0, d_doc),
                        prm.phase, prm.rng);
  } else {
    std::copy(ws.hd.begin(), ws.hd.end(), ws.h.begin());
  }
  for (size_t p = 0; p < ctx_len; ++p) {
    auto wv = m.word_embeddings.row(rec.context[p]);
    std::copy(wv.begin(), wv.end(), ws.h.begin() + d_doc + p * d_word);
  }

  ws.batch.assemble(rec.center, prm.sampler->log_probability(rec.center), true);
  double loss =
      ws.ss.forward(std::span<const T>(ws.h), std::span<const uint32_t>(ws.batch.candidates),
                    m.output_weights, std::span<const T>(m.output_bias.values),
                    std::span<const double>(ws.batch.logq));
  if (!compute_grads) return loss;

  ws.dh.assign(h_len, T(0));
  ws.ss.add_input_grad(std::span<const uint32_t>(ws.batch.candidates), m.output_weights,
                       std::span<T>(ws.dh));

  // doc part
  ws.dhd.resize(d_doc);
  if (m.binarizer.active()) {
    m.binarizer.backward(std::span<const T>(ws.dh).subspan(0, d_doc), std::span<const T>(ws.hd),
                         std::span<T>(ws.dhd));
  } else {
    std::copy(ws.dh.begin(), ws.dh.begin() + d_doc, ws.dhd.begin());
  }
  ws.dh0.resize(d_doc);
  if (prm.dropout_keep >= 1.0) {
    std::copy(ws.dhd.begin(), ws.dhd.end(), ws.dh0.begin());
  } else {
    for (size_t i = 0; i < d_doc; ++i) ws.dh0[i] = ws.dhd[i] * ws.mask[i];
  }

  // word-part gradients, accumulated per id (context words may repeat)
  if (!prm.freeze_weights) {
    ws.word_slot.clear();
    ws.word_ids.clear();
    ws.word_grads.clear();
    for (size_t p = 0; p < ctx_len; ++p) {
      uint32_t wid = rec.context[p];
      auto [it, fresh] = ws.word_slot.emplace(wid, ws.word_grads.size());
      if (fresh) {
        ws.word_ids.push_back(wid);
        ws.word_grads.emplace_back(d_word, T(0));
      }
      auto& g = ws.word_grads[it->second];
      const T* src = ws.dh.data() + d_doc + p * d_word;
      for (size_t i = 0; i < d_word; ++i) g[i] += src[i];
    }
  }
  if (!prm.update) return loss;

  T lr = static_cast<T>(prm.lr);
  T aeps = static_cast<T>(prm.adagrad_eps);
  nncore::adagrad_update_row(m.doc_embeddings, rec.doc, std::span<const T>(ws.dh0), lr, aeps);
  if (!prm.freeze_weights) {
    std::sort(ws.word_ids.begin(), ws.word_ids.end());
    for (uint32_t wid : ws.word_ids)
      nncore::adagrad_update_row(m.word_embeddings, wid,
                                 std::span<const T>(ws.word_grads[ws.word_slot[wid]]), lr, aeps);
    detail::sorted_candidates(ws.batch.candidates, ws.order);
    detail::update_output_rows(m, ws, std::span<const T>(ws.h), lr, aeps);
  }
  return loss;
}

// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void check_store(const PvModel<T>& m, const corpus::ExampleStore& store) {
  if (m.kind == PvKind::pvdm) {
    if (store.variant() != corpus::StoreVariant::dm)
      throw std::invalid_argument("pvdm expects a DM example store");
    if (store.width() != corpus::dm_record_width(static_cast<int>(m.window), m.one_sided))
      throw std::invalid_argument("DM store width does not match the model window");
  } else {
    if (store.variant() != corpus::StoreVariant::dbow)
      throw std::invalid_argument("this model expects a DBOW example store");
  }
}

template <typename T>
double pv_epoch(PvModel<T>& m, const corpus::ExampleStore& store,
                const nncore::LogUniformSampler& sampler, const TrainConfig& cfg,
                uint64_t epoch_tag, double lr, binarize::Phase phase, bool freeze,
                std::vector<uint8_t>* seen) {
  auto process = [&](const nncore::Batch& batch, int, Rng& rng) -> double {
    thread_local PvWorkspace<T> ws;
    ws.batch.draw(sampler, cfg.negatives, rng);
    PvStepParams<T> prm;
    prm.lr = lr;
    prm.dropout_keep = cfg.dropout_keep;
    prm.adagrad_eps = cfg.adagrad_eps;
    prm.phase = phase;
    prm.freeze_weights = freeze;
    prm.sampler = &sampler;
    prm.rng = &rng;
    double sum = 0.0;
    const uint32_t width = store.width();
    if (m.kind == PvKind::pvdm) {
      corpus::DmRecord rec;
      for (size_t i = 0; i < batch.records; ++i) {
        corpus::unpack_dm(batch.record(i, width), width, rec);
        if (seen) (*seen)[rec.doc] = 1;
        sum += pv_dm_step(m, rec, prm, ws);
      }
    } else {
      corpus::DbowRecord rec;
      for (size_t i = 0; i < batch.records; ++i) {
        corpus::unpack_dbow(batch.record(i, width), rec);
        if (seen) (*seen)[rec.doc] = 1;
        sum += pv_dbow_step(m, rec, prm, ws);
      }
    }
    return sum;
  };
  auto [total, count] =
      nncore::run_epoch(store, cfg.batch_size, cfg.workers, cfg.seed, epoch_tag, process);
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace detail

// Trains in place; returns per-epoch mean losses.
template <typename T>
std::vector<double> train_pv(PvModel<T>& m, const corpus::ExampleStore& store,
                             const nncore::LogUniformSampler& sampler, const TrainConfig& cfg) {
  cfg.validate();
  detail::check_store(m, store);
  if (static_cast<int64_t>(sampler.num_classes()) != m.num_classes())
    throw std::invalid_argument("sampler class count does not match the model");
  std::vector<double> losses;
  for (uint64_t e = 0; e < cfg.epochs; ++e) {
    if (m.binarizer.anneal) m.binarizer.set_epoch(static_cast<int>(e));
    losses.push_back(detail::pv_epoch(m, store, sampler, cfg, e, cfg.learning_rate,
                                      binarize::Phase::train, /*freeze=*/false, nullptr));
  }
  return losses;
}

template <typename T>
struct PvInferResult {
  nncore::Matrix<T> embeddings;   // num_new_docs x d
  std::vector<uint8_t> seen;      // 0 = no records for this doc (kept its init)
  std::vector<double> epoch_losses;
};

// Optimizes fresh document rows against the frozen model. The model is passed
// mutably only so the step code can be shared; frozen parameters (softmax
// weights, bias, projection, word vectors) are never written. Records must
// index documents as 0..num_new_docs-1. The slope of an annealed binarizer
// stays at its final training value.
template <typename T>
PvInferResult<T> infer_embeddings(PvModel<T>& m, const corpus::ExampleStore& store,
                                  int64_t num_new_docs,
                                  const nncore::LogUniformSampler& sampler,
                                  const TrainConfig& cfg) {
  cfg.validate();
  detail::check_store(m, store);
  PvInferResult<T> result;
  result.embeddings = nncore::Matrix<T>(num_new_docs, m.doc_embeddings.cols);
  Rng init(derive_seed(cfg.seed, 0));
  nncore::uniform_init(result.embeddings, init);
  result.seen.assign(static_cast<size_t>(num_new_docs), 0);

  std::swap(m.doc_embeddings, result.embeddings);
  uint64_t epochs = cfg.infer_epochs.value_or(cfg.epochs);
  try {
    for (uint64_t e = 0; e < epochs; ++e)
      result.epoch_losses.push_back(
          detail::pv_epoch(m, store, sampler, cfg, 0x1f000000ULL + e, cfg.learning_rate,
                           binarize::Phase::train, /*freeze=*/true, &result.seen));
  } catch (...) {
    std::swap(m.doc_embeddings, result.embeddings);
    throw;
  }
  std::swap(m.doc_embeddings, result.embeddings);
  return result;
}

// ---------------------------------------------------------------------------
// Code extraction: pure forward pass (no dropout, inference-phase coding).

template <typename T>
std::vector<T> code_activations(const PvModel<T>& m, std::span<const T> embedding) {
  if (m.kind == PvKind::realbinary) {
    std::vector<T> act(static_cast<size_t>(m.projection.cols), T(0));
    for (size_t j = 0; j < act.size(); ++j)
      for (size_t i = 0; i < embedding.size(); ++i)
        act[j] += embedding[i] * m.projection.row(i)[j];
    return act;
  }
  return std::vector<T>(embedding.begin(), embedding.end());
}

template <typename T>
binarize::BinaryCode doc_binary_code(const PvModel<T>& m, std::span<const T> embedding) {
  if (!m.binarizer.active())
    throw std::logic_error("model has no coding layer; export real embeddings instead");
  auto act = code_activations(m, embedding);
  std::vector<T> bits(act.size());
  m.binarizer.forward(std::span<const T>(act), std::span<T>(bits), binarize::Phase::infer,
                      nullptr);
  return binarize::BinaryCode::from_activations(std::span<const T>(bits));
}

template <typename T>
std::vector<binarize::BinaryCode> all_binary_codes(const PvModel<T>& m,
                                                   const nncore::Matrix<T>& docs) {
  std::vector<binarize::BinaryCode> codes;
  codes.reserve(static_cast<size_t>(docs.rows));
  for (int64_t r = 0; r < docs.rows; ++r)
    codes.push_back(doc_binary_code(m, std::span<const T>(docs.row(r))));
  return codes;
}

}  // namespace textvec::pvmodels
