#pragma once

// Training for the multi-sense skip-gram model and the plain (single-sense)
// skip-gram path it reduces to. Per record (center w, contexts C):
//
//   pretrain: e = sum_s p_s v_{w,s}          (expected sense embedding)
//   finetune: z = softmax((clamped log p + gumbel) / t), e = sum_s z_s v_{w,s}
//   loss = sum_{c in C} sampledCE(c | e) + gamma * H_eps(p) + delta * L_H(v_w)
//
// with H_eps(p) = -sum_s p_s log(p_s + eps). Positive gamma drives the
// posterior toward polarized (low-entropy) sense usage; the pretraining
// default is a small negative gamma, which rewards entropy and keeps all
// senses in play early. Gradients flow to v, q and u (u both through the
// per-context softmax candidates and through rbar); all three get one AdaGrad
// update per record from the fully accumulated gradient.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "textvec/corpus/examples.hpp"
#include "textvec/dsg/model.hpp"
#include "textvec/nncore/batching.hpp"
#include "textvec/nncore/sampled_softmax.hpp"
#include "textvec/nncore/sampler.hpp"

namespace textvec::dsg {

enum class DsgPhase { pretrain, finetune };

template <typename T>
struct DsgStepParams {
  DsgPhase phase = DsgPhase::pretrain;
  double lr = 0.1;
  double temperature = 1.0;  // finetune only
  double gamma = 0.0;        // entropy cost (minimized-loss convention)
  double delta = 0.0;        // parallel penalty weight
  double eps = 1e-8;
  double adagrad_eps = 1e-8;
  std::span<const uint32_t> negatives;  // shared per batch
  std::span<const double> negative_logq;
  const nncore::LogUniformSampler* sampler = nullptr;  // logq of true classes
  Rng* rng = nullptr;                       // gumbel draws (finetune, k > 1)
  std::span<const double> frozen_gumbel;    // overrides rng (gradient checks)
  bool update = true;                       // false: gradients only
};

// Scratch buffers reused across records.
template <typename T>
struct DsgWorkspace {
  std::vector<T> rbar, p, z, logits, dz, da, dp, db, vtilde, dvtilde, drbar, wgrad;
  std::vector<T> dv, dq;  // k*d dense gradients for the center word
  std::vector<std::vector<T>> ctx_probs;
  std::vector<std::vector<uint32_t>> ctx_cands;
  std::vector<std::vector<double>> ctx_logq;
  // u-row gradient accumulation (ids can repeat across contexts/negatives)
  std::unordered_map<uint32_t, size_t> u_slot;
  std::vector<uint32_t> u_ids;
  std::vector<std::vector<T>> u_grads;

  void reset(const SenseModel<T>& m) {
    size_t d = static_cast<size_t>(m.d);
    rbar.assign(d, T(0));
    p.assign(m.k, T(0));
    z.assign(m.k, T(0));
    vtilde.assign(d, T(0));
    dvtilde.assign(d, T(0));
    drbar.assign(d, T(0));
    wgrad.assign(d, T(0));
    dz.assign(m.k, T(0));
    da.assign(m.k, T(0));
    dp.assign(m.k, T(0));
    db.assign(m.k, T(0));
    dv.assign(static_cast<size_t>(m.k) * d, T(0));
    dq.assign(static_cast<size_t>(m.k) * d, T(0));
    u_slot.clear();
    u_ids.clear();
    u_grads.clear();
  }

  std::span<T> u_grad(uint32_t id, size_t d) {
    auto [it, fresh] = u_slot.emplace(id, u_grads.size());
    if (fresh) {
      u_ids.push_back(id);
      u_grads.emplace_back(d, T(0));
    }
    return std::span<T>(u_grads[it->second]);
  }
};

namespace detail {

// softmax backward: given y = softmax(x) and dL/dy, write dL/dx.
template <typename T>
void softmax_backward(std::span<const T> y, std::span<const T> dy, std::span<T> dx) {
  T inner = T(0);
  for (size_t i = 0; i < y.size(); ++i) inner += y[i] * dy[i];
  for (size_t i = 0; i < y.size(); ++i) dx[i] = y[i] * (dy[i] - inner);
}

template <typename T>
void assemble_candidates(uint32_t true_id, const DsgStepParams<T>& prm,
                         std::vector<uint32_t>& cands, std::vector<double>& logq) {
  cands.clear();
  logq.clear();
  cands.push_back(true_id);
  bool correct = prm.sampler != nullptr;
  if (correct) logq.push_back(prm.sampler->log_probability(true_id));
  for (size_t i = 0; i < prm.negatives.size(); ++i) {
    if (prm.negatives[i] == true_id) continue;
    cands.push_back(prm.negatives[i]);
    if (correct) logq.push_back(prm.negative_logq[i]);
  }
}

}  // namespace detail

// One record; returns the record loss. With prm.update the model is updated
// in place; otherwise gradients are left in the workspace (dv, dq, u_grads).
template <typename T>
double dsg_record_step(SenseModel<T>& m, const corpus::SgRecord& rec,
                       const DsgStepParams<T>& prm, DsgWorkspace<T>& ws,
                       bool compute_grads = true) {
  const size_t d = static_cast<size_t>(m.d);
  const uint32_t k = m.k;
  const size_t nctx = rec.context.size();
  ws.reset(m);

  // ---- forward: posterior over senses ----
  context_vector(m, std::span<const uint32_t>(rec.context), std::span<T>(ws.rbar));
  sense_posterior(m, rec.center, std::span<const T>(ws.rbar), std::span<T>(ws.p));

  if (prm.phase == DsgPhase::finetune) {
    if (k == 1) {
      ws.z[0] = T(1);
    } else {
      double log_eps = std::log(prm.eps);
      for (uint32_t s = 0; s < k; ++s) {
        double g = prm.frozen_gumbel.empty() ? prm.rng->gumbel() : prm.frozen_gumbel[s];
        double lp = std::max(std::log(static_cast<double>(ws.p[s])), log_eps);
        ws.z[s] = static_cast<T>((lp + g) / prm.temperature);
      }
      nncore::softmax_inplace(std::span<T>(ws.z));
    }
  } else {
    std::copy(ws.p.begin(), ws.p.end(), ws.z.begin());
  }

  weighted_sense_sum(m, rec.center, std::span<const T>(ws.z), std::span<T>(ws.vtilde));

  // ---- forward: per-context sampled softmax ----
  if (ws.ctx_probs.size() < nctx) {
    ws.ctx_probs.resize(nctx);
    ws.ctx_cands.resize(nctx);
    ws.ctx_logq.resize(nctx);
  }
  double loss = 0.0;
  nncore::SampledSoftmax<T> ss;
  for (size_t j = 0; j < nctx; ++j) {
    detail::assemble_candidates(rec.context[j], prm, ws.ctx_cands[j], ws.ctx_logq[j]);
    loss += ss.forward(std::span<const T>(ws.vtilde), std::span<const uint32_t>(ws.ctx_cands[j]),
                       m.outputs, {}, std::span<const double>(ws.ctx_logq[j]));
    ws.ctx_probs[j].assign(ss.probs().begin(), ss.probs().end());
  }

  // ---- forward: regularizers ----
  double huber_dx = 0.0;
  if (prm.gamma != 0.0) {
    double ent = 0.0;
    for (uint32_t s = 0; s < k; ++s)
      ent -= static_cast<double>(ws.p[s]) *
             std::log(static_cast<double>(ws.p[s]) + prm.eps);
    loss += prm.gamma * ent;
  }
  if (prm.delta != 0.0) loss += prm.delta * huber_parallel_penalty(m, rec.center, &huber_dx);

  if (!compute_grads) return loss;

  // ---- backward: CE path ----
  for (size_t j = 0; j < nctx; ++j) {
    const auto& cands = ws.ctx_cands[j];
    const auto& probs = ws.ctx_probs[j];
    for (size_t c = 0; c < cands.size(); ++c) {
      T coeff = probs[c] - (c == 0 ? T(1) : T(0));
      auto w = m.outputs.row(cands[c]);
      for (size_t i = 0; i < d; ++i) ws.dvtilde[i] += coeff * w[i];
      auto g = ws.u_grad(cands[c], d);
      for (size_t i = 0; i < d; ++i) g[i] += coeff * ws.vtilde[i];
    }
  }

  // ---- backward: through the sense mixture ----
  for (uint32_t s = 0; s < k; ++s) {
    auto v = m.sense(rec.center, s);
    T* dvs = ws.dv.data() + static_cast<size_t>(s) * d;
    T zs = ws.z[s];
    for (size_t i = 0; i < d; ++i) dvs[i] += zs * ws.dvtilde[i];
    ws.dz[s] = nncore::dot(std::span<const T>(v), std::span<const T>(ws.dvtilde));
  }

  if (prm.phase == DsgPhase::finetune) {
    if (k > 1) {
      detail::softmax_backward(std::span<const T>(ws.z), std::span<const T>(ws.dz),
                               std::span<T>(ws.da));
      for (uint32_t s = 0; s < k; ++s) {
        double ps = static_cast<double>(ws.p[s]);
        bool clamped = std::log(ps) < std::log(prm.eps);
        ws.dp[s] = clamped ? T(0)
                           : static_cast<T>(static_cast<double>(ws.da[s]) /
                                            (prm.temperature * ps));
      }
    }
    // k == 1: z is constant, no gradient into p
  } else {
    std::copy(ws.dz.begin(), ws.dz.end(), ws.dp.begin());
  }

  if (prm.gamma != 0.0) {
    for (uint32_t s = 0; s < k; ++s) {
      double ps = static_cast<double>(ws.p[s]);
      ws.dp[s] += static_cast<T>(prm.gamma * (-std::log(ps + prm.eps) - ps / (ps + prm.eps)));
    }
  }

  // ---- backward: through the posterior into q and rbar ----
  detail::softmax_backward(std::span<const T>(ws.p), std::span<const T>(ws.dp),
                           std::span<T>(ws.db));
  for (uint32_t s = 0; s < k; ++s) {
    auto qv = m.q(rec.center, s);
    T* dqs = ws.dq.data() + static_cast<size_t>(s) * d;
    T dbs = ws.db[s];
    for (size_t i = 0; i < d; ++i) {
      dqs[i] += dbs * ws.rbar[i];
      ws.drbar[i] += dbs * qv[i];
    }
  }
  T inv_ctx = T(1) / static_cast<T>(nctx);
  for (uint32_t c : rec.context) {
    auto g = ws.u_grad(c, d);
    for (size_t i = 0; i < d; ++i) g[i] += ws.drbar[i] * inv_ctx;
  }

  // ---- backward: parallel penalty ----
  if (prm.delta != 0.0 && k >= 2) {
    std::vector<T> total(d, T(0));
    for (uint32_t s = 0; s < k; ++s) {
      auto v = m.sense(rec.center, s);
      for (size_t i = 0; i < d; ++i) total[i] += v[i];
    }
    T factor = static_cast<T>(prm.delta * huber_dx * 2.0);
    for (uint32_t s = 0; s < k; ++s) {
      auto v = m.sense(rec.center, s);
      T* dvs = ws.dv.data() + static_cast<size_t>(s) * d;
      for (size_t i = 0; i < d; ++i) dvs[i] += factor * (total[i] - v[i]);
    }
  }

  if (!prm.update) return loss;

  // ---- AdaGrad updates: senses, disambiguation, then touched u rows ----
  T lr = static_cast<T>(prm.lr);
  T aeps = static_cast<T>(prm.adagrad_eps);
  for (uint32_t s = 0; s < k; ++s)
    nncore::adagrad_update_row(m.senses, static_cast<int64_t>(rec.center) * k + s,
                               std::span<const T>(ws.dv.data() + static_cast<size_t>(s) * d, d),
                               lr, aeps);
  for (uint32_t s = 0; s < k; ++s)
    nncore::adagrad_update_row(m.disambig, m.q_row(rec.center, s),
                               std::span<const T>(ws.dq.data() + static_cast<size_t>(s) * d, d),
                               lr, aeps);
  std::sort(ws.u_ids.begin(), ws.u_ids.end());
  for (uint32_t id : ws.u_ids)
    nncore::adagrad_update_row(m.outputs, id,
                               std::span<const T>(ws.u_grads[ws.u_slot[id]]), lr, aeps);
  return loss;
}

// Plain skip-gram on a k=1 model: same candidate assembly, same softmax
// kernel, same update order, none of the sense machinery.
template <typename T>
double sg_record_step(SenseModel<T>& m, const corpus::SgRecord& rec,
                      const DsgStepParams<T>& prm, DsgWorkspace<T>& ws) {
  if (m.k != 1) throw std::invalid_argument("plain skip-gram requires a k=1 model");
  const size_t d = static_cast<size_t>(m.d);
  ws.reset(m);
  auto v = m.sense(rec.center, 0);
  std::copy(v.begin(), v.end(), ws.vtilde.begin());

  size_t nctx = rec.context.size();
  if (ws.ctx_probs.size() < nctx) {
    ws.ctx_probs.resize(nctx);
    ws.ctx_cands.resize(nctx);
    ws.ctx_logq.resize(nctx);
  }
  double loss = 0.0;
  nncore::SampledSoftmax<T> ss;
  for (size_t j = 0; j < nctx; ++j) {
    detail::assemble_candidates(rec.context[j], prm, ws.ctx_cands[j], ws.ctx_logq[j]);
    loss += ss.forward(std::span<const T>(ws.vtilde), std::span<const uint32_t>(ws.ctx_cands[j]),
                       m.outputs, {}, std::span<const double>(ws.ctx_logq[j]));
    ws.ctx_probs[j].assign(ss.probs().begin(), ss.probs().end());
  }

  for (size_t j = 0; j < nctx; ++j) {
    const auto& cands = ws.ctx_cands[j];
    const auto& probs = ws.ctx_probs[j];
    for (size_t c = 0; c < cands.size(); ++c) {
      T coeff = probs[c] - (c == 0 ? T(1) : T(0));
      auto w = m.outputs.row(cands[c]);
      for (size_t i = 0; i < d; ++i) ws.dvtilde[i] += coeff * w[i];
      auto g = ws.u_grad(cands[c], d);
      for (size_t i = 0; i < d; ++i) g[i] += coeff * ws.vtilde[i];
    }
  }

  if (!prm.update) return loss;
  T lr = static_cast<T>(prm.lr);
  T aeps = static_cast<T>(prm.adagrad_eps);
  nncore::adagrad_update_row(m.senses, rec.center, std::span<const T>(ws.dvtilde), lr, aeps);
  std::sort(ws.u_ids.begin(), ws.u_ids.end());
  for (uint32_t id : ws.u_ids)
    nncore::adagrad_update_row(m.outputs, id,
                               std::span<const T>(ws.u_grads[ws.u_slot[id]]), lr, aeps);
  return loss;
}

// -----------------------------------------------------------------------------

struct DsgTrainConfig {
  double pretrain_lr = 1.0;        // decays linearly to 0 across the epoch
  double pretrain_gamma = -0.01;   // entropy reward during pretraining
  std::vector<double> finetune_lrs{0.1, 0.05, 0.01};
  double gamma = 0.0;              // fine-tune entropy cost
  double delta = 0.0;              // parallel penalty
  double eps = 1e-8;
  double temp_start = 1.0;
  double temp_end = 0.5;           // reached at the end of the first ft epoch
  size_t negatives = 64;
  size_t batch_size = 128;
  int workers = 1;
  uint64_t seed = 1;
  double adagrad_eps = 1e-8;
};

namespace detail {

template <typename T>
double run_sg_epoch(SenseModel<T>& m, const corpus::ExampleStore& store,
                    const nncore::LogUniformSampler& sampler, const DsgTrainConfig& cfg,
                    uint64_t epoch_tag, DsgPhase phase, double lr_start, double lr_end,
                    double t_start, double t_end, double gamma, bool vanilla) {
  if (store.variant() != corpus::StoreVariant::sg)
    throw std::invalid_argument("expected an SG example store");
  const uint32_t width = store.width();
  const double denom = store.count() > 0 ? static_cast<double>(store.count()) : 1.0;

  auto process = [&](const nncore::Batch& batch, int, Rng& rng) -> double {
    nncore::SampledBatch negs;
    negs.draw(sampler, cfg.negatives, rng);
    thread_local DsgWorkspace<T> tl_ws;
    DsgStepParams<T> prm;
    prm.phase = phase;
    prm.gamma = gamma;
    prm.delta = phase == DsgPhase::finetune ? cfg.delta : 0.0;
    prm.eps = cfg.eps;
    prm.adagrad_eps = cfg.adagrad_eps;
    prm.negatives = std::span<const uint32_t>(negs.negatives);
    prm.negative_logq = std::span<const double>(negs.negative_logq);
    prm.sampler = &sampler;
    prm.rng = &rng;
    double sum = 0.0;
    corpus::SgRecord rec;
    for (size_t i = 0; i < batch.records; ++i) {
      corpus::unpack_sg(batch.record(i, width), width, rec);
      double frac = static_cast<double>(batch.first_index + i) / denom;
      prm.lr = lr_start + (lr_end - lr_start) * frac;
      prm.temperature = t_start + (t_end - t_start) * frac;
      sum += vanilla ? sg_record_step(m, rec, prm, tl_ws)
                     : dsg_record_step(m, rec, prm, tl_ws);
    }
    return sum;
  };

  auto [total, count] =
      nncore::run_epoch(store, cfg.batch_size, cfg.workers, cfg.seed, epoch_tag, process);
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

}  // namespace detail

// One expected-embedding epoch with shared disambiguation vectors; the caller
// broadcasts q afterwards. Returns the epoch's mean record loss.
template <typename T>
double dsg_pretrain(SenseModel<T>& m, const corpus::ExampleStore& store,
                    const nncore::LogUniformSampler& sampler, const DsgTrainConfig& cfg) {
  if (!m.disambig_shared)
    throw std::logic_error("pretrain expects shared disambiguation vectors");
  return detail::run_sg_epoch(m, store, sampler, cfg, /*epoch_tag=*/0, DsgPhase::pretrain,
                              cfg.pretrain_lr, 0.0, 1.0, 1.0, cfg.pretrain_gamma,
                              /*vanilla=*/false);
}

// Gumbel-Softmax epochs at cfg.finetune_lrs; temperature decays across the
// first epoch only. Returns per-epoch mean losses.
template <typename T>
std::vector<double> dsg_finetune(SenseModel<T>& m, const corpus::ExampleStore& store,
                                 const nncore::LogUniformSampler& sampler,
                                 const DsgTrainConfig& cfg) {
  if (m.disambig_shared)
    throw std::logic_error("finetune expects per-word disambiguation vectors (broadcast first)");
  std::vector<double> losses;
  for (size_t e = 0; e < cfg.finetune_lrs.size(); ++e) {
    double t0 = e == 0 ? cfg.temp_start : cfg.temp_end;
    losses.push_back(detail::run_sg_epoch(m, store, sampler, cfg, /*epoch_tag=*/1 + e,
                                          DsgPhase::finetune, cfg.finetune_lrs[e],
                                          cfg.finetune_lrs[e], t0, cfg.temp_end, cfg.gamma,
                                          /*vanilla=*/false));
  }
  return losses;
}

// Plain skip-gram training (k=1 model), mirroring the fine-tune schedule.
template <typename T>
std::vector<double> sg_train(SenseModel<T>& m, const corpus::ExampleStore& store,
                             const nncore::LogUniformSampler& sampler,
                             const DsgTrainConfig& cfg) {
  std::vector<double> losses;
  for (size_t e = 0; e < cfg.finetune_lrs.size(); ++e)
    losses.push_back(detail::run_sg_epoch(m, store, sampler, cfg, 1 + e, DsgPhase::finetune,
                                          cfg.finetune_lrs[e], cfg.finetune_lrs[e], 1.0, 1.0,
                                          0.0, /*vanilla=*/true));
  return losses;
}

// Corpus pass averaging the sense posterior per center word. Unseen words get
// uniform marginals and marginal_known = 0.
template <typename T>
void estimate_marginals(SenseModel<T>& m, const corpus::ExampleStore& store, int workers = 1) {
  if (store.variant() != corpus::StoreVariant::sg)
    throw std::invalid_argument("expected an SG example store");
  size_t v = m.vocab();
  uint32_t k = m.k;
  std::vector<double> sums(v * k, 0.0);
  std::vector<uint64_t> counts(v, 0);

  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  uint64_t n = store.count();
  std::vector<std::thread> pool;
  std::mutex merge_mu;
  uint64_t chunk = workers > 1 ? (n + workers - 1) / static_cast<uint64_t>(workers) : n;
  for (int w = 0; w < workers; ++w) {
    uint64_t begin = std::min<uint64_t>(n, static_cast<uint64_t>(w) * chunk);
    uint64_t end = std::min<uint64_t>(n, begin + chunk);
    auto work = [&, begin, end] {
      std::vector<double> local_sums(v * k, 0.0);
      std::vector<uint64_t> local_counts(v, 0);
      auto reader = store.range_reader(begin, end);
      std::vector<char> buf(store.width());
      corpus::SgRecord rec;
      std::vector<T> rbar(static_cast<size_t>(m.d)), p(k);
      while (reader.next(buf.data())) {
        corpus::unpack_sg(reinterpret_cast<const uint32_t*>(buf.data()), store.width(), rec);
        context_vector(m, std::span<const uint32_t>(rec.context), std::span<T>(rbar));
        sense_posterior(m, rec.center, std::span<const T>(rbar), std::span<T>(p));
        for (uint32_t s = 0; s < k; ++s)
          local_sums[static_cast<size_t>(rec.center) * k + s] += static_cast<double>(p[s]);
        ++local_counts[rec.center];
      }
      std::lock_guard<std::mutex> lk(merge_mu);
      for (size_t i = 0; i < sums.size(); ++i) sums[i] += local_sums[i];
      for (size_t i = 0; i < counts.size(); ++i) counts[i] += local_counts[i];
    };
    if (workers == 1)
      work();
    else
      pool.emplace_back(work);
  }
  for (auto& t : pool) t.join();

  for (size_t wd = 0; wd < v; ++wd) {
    auto row = m.marginals.row(static_cast<int64_t>(wd));
    if (counts[wd] == 0) {
      for (uint32_t s = 0; s < k; ++s) row[s] = static_cast<T>(1.0 / k);
      m.marginal_known[wd] = 0;
    } else {
      for (uint32_t s = 0; s < k; ++s)
        row[s] = static_cast<T>(sums[wd * k + s] / static_cast<double>(counts[wd]));
      m.marginal_known[wd] = 1;
    }
  }
}

// Masks senses with marginal below threshold (keeping the argmax sense when a
// word would lose all of them); returns the mean active-sense count per word.
template <typename T>
double prune_senses(SenseModel<T>& m, double threshold = 0.05) {
  size_t v = m.vocab();
  uint64_t active_total = 0;
  for (size_t w = 0; w < v; ++w) {
    auto row = m.marginals.row(static_cast<int64_t>(w));
    uint32_t best = 0;
    size_t kept = 0;
    for (uint32_t s = 0; s < m.k; ++s) {
      if (row[s] > row[best]) best = s;
      bool keep = static_cast<double>(row[s]) >= threshold;
      m.active[w * m.k + s] = keep ? 1 : 0;
      if (keep) ++kept;
    }
    if (kept == 0) {
      m.active[w * m.k + best] = 1;
      kept = 1;
    }
    active_total += kept;
  }
  return v > 0 ? static_cast<double>(active_total) / static_cast<double>(v) : 0.0;
}

}  // namespace textvec::dsg
