#include "textvec/gradcheck_suite.hpp"

#include "textvec/dsg/train.hpp"
#include "textvec/nncore/gradcheck.hpp"
#include "textvec/pvmodels/train.hpp"

namespace textvec::gradcheck {

namespace {

std::vector<uint64_t> random_frequencies(size_t n, Rng& rng) {
  std::vector<uint64_t> f(n);
  for (auto& x : f) x = 1 + rng.uniform_int(50);
  return f;
}

void randomize(nncore::Matrix<double>& m, Rng& rng, double scale = 0.5) {
  for (auto& x : m.values) x = rng.uniform(-scale, scale);
}

// Dense gradient of the output layer reconstructed from the softmax state.
template <typename Ws>
void output_grads(const Ws& ws, std::span<const double> input, int64_t classes,
                  std::vector<double>& dw, std::vector<double>& db) {
  dw.assign(static_cast<size_t>(classes) * input.size(), 0.0);
  db.assign(static_cast<size_t>(classes), 0.0);
  for (size_t j = 0; j < ws.batch.candidates.size(); ++j) {
    uint32_t cls = ws.batch.candidates[j];
    double c = ws.ss.coeff(j);
    for (size_t i = 0; i < input.size(); ++i) dw[cls * input.size() + i] += c * input[i];
    db[cls] += c;
  }
}

binarize::BinarizationStrategy smooth_strategy(Rng& rng) {
  binarize::BinarizationStrategy s;
  // any of the sigmoid-derivative kinds is exactly differentiable in the
  // smooth phase; vary the slope to exercise the chain rule
  switch (rng.uniform_int(3)) {
    case 0: s.kind = binarize::BinarizerKind::krizhevsky; break;
    case 1: s.kind = binarize::BinarizerKind::gaussian; break;
    default: s.kind = binarize::BinarizerKind::bsn_sigmoid; break;
  }
  s.anneal = true;
  s.anneal_increment = 0.1;
  s.set_epoch(static_cast<int>(rng.uniform_int(5)));
  return s;
}

}  // namespace

double check_pvdbow(uint64_t seed, bool binarized) {
  Rng rng(seed);
  const int64_t docs = 3, d = 6, classes = 12;
  binarize::BinarizationStrategy strat;
  if (binarized) strat = smooth_strategy(rng);
  auto m = pvmodels::make_pvdbow<double>(docs, d, classes, strat, rng.next_u64());
  randomize(m.output_weights, rng);
  randomize(m.output_bias, rng, 0.1);

  nncore::LogUniformSampler sampler(random_frequencies(static_cast<size_t>(classes), rng));
  corpus::DbowRecord rec{static_cast<uint32_t>(rng.uniform_int(docs)),
                         static_cast<uint32_t>(rng.uniform_int(classes))};

  pvmodels::PvWorkspace<double> ws;
  ws.batch.draw(sampler, 6, rng);
  Rng dummy(0);
  pvmodels::PvStepParams<double> prm;
  prm.phase = binarized ? binarize::Phase::smooth : binarize::Phase::train;
  prm.sampler = &sampler;
  prm.rng = &dummy;
  prm.update = false;

  pvmodels::pv_dbow_step(m, rec, prm, ws);
  std::vector<double> ddoc(m.doc_embeddings.values.size(), 0.0);
  for (int64_t i = 0; i < d; ++i) ddoc[rec.doc * d + i] = ws.dh0[static_cast<size_t>(i)];
  std::vector<double> dw, db;
  output_grads(ws, std::span<const double>(ws.code), classes, dw, db);

  auto loss = [&] { return pv_dbow_step(m, rec, prm, ws, /*compute_grads=*/false); };
  auto rep = nncore::finite_diff_check({&m.doc_embeddings, &m.output_weights, &m.output_bias},
                                       loss, {ddoc, dw, db});
  return rep.max_rel_err;
}

double check_pvdm(uint64_t seed) {
  Rng rng(seed);
  const int64_t docs = 3, d_doc = 5, d_word = 4, unigrams = 9;
  const uint32_t window = 2;
  binarize::BinarizationStrategy strat;  // real path; coding layer checked in DBOW
  auto m = pvmodels::make_pvdm<double>(docs, d_doc, d_word, unigrams, window,
                                       /*one_sided=*/true, strat, rng.next_u64());
  randomize(m.output_weights, rng);
  randomize(m.output_bias, rng, 0.1);

  nncore::LogUniformSampler sampler(random_frequencies(static_cast<size_t>(unigrams), rng));
  corpus::DmRecord rec;
  rec.doc = static_cast<uint32_t>(rng.uniform_int(docs));
  rec.center = static_cast<uint32_t>(rng.uniform_int(unigrams));
  uint32_t repeated = static_cast<uint32_t>(rng.uniform_int(unigrams));
  rec.context = {repeated, repeated};  // repeated id exercises accumulation

  pvmodels::PvWorkspace<double> ws;
  ws.batch.draw(sampler, 5, rng);
  Rng dummy(0);
  pvmodels::PvStepParams<double> prm;
  prm.sampler = &sampler;
  prm.rng = &dummy;
  prm.update = false;

  pvmodels::pv_dm_step(m, rec, prm, ws);
  std::vector<double> ddoc(m.doc_embeddings.values.size(), 0.0);
  for (int64_t i = 0; i < d_doc; ++i) ddoc[rec.doc * d_doc + i] = ws.dh0[static_cast<size_t>(i)];
  std::vector<double> dword(m.word_embeddings.values.size(), 0.0);
  for (size_t g = 0; g < ws.word_ids.size(); ++g) {
    uint32_t wid = ws.word_ids[g];
    const auto& grad = ws.word_grads[ws.word_slot.at(wid)];
    for (int64_t i = 0; i < d_word; ++i) dword[wid * d_word + i] += grad[static_cast<size_t>(i)];
  }
  std::vector<double> dw, db;
  output_grads(ws, std::span<const double>(ws.h), unigrams, dw, db);

  auto loss = [&] { return pv_dm_step(m, rec, prm, ws, false); };
  auto rep = nncore::finite_diff_check(
      {&m.doc_embeddings, &m.word_embeddings, &m.output_weights, &m.output_bias}, loss,
      {ddoc, dword, dw, db});
  return rep.max_rel_err;
}

double check_realbinary(uint64_t seed) {
  Rng rng(seed);
  const int64_t docs = 2, d_real = 7, d_bin = 5, classes = 11;
  auto strat = smooth_strategy(rng);
  auto m = pvmodels::make_realbinary<double>(docs, d_real, d_bin, classes, strat, rng.next_u64());
  randomize(m.output_weights, rng);
  randomize(m.output_bias, rng, 0.1);
  randomize(m.projection, rng);

  nncore::LogUniformSampler sampler(random_frequencies(static_cast<size_t>(classes), rng));
  corpus::DbowRecord rec{static_cast<uint32_t>(rng.uniform_int(docs)),
                         static_cast<uint32_t>(rng.uniform_int(classes))};

  pvmodels::PvWorkspace<double> ws;
  ws.batch.draw(sampler, 6, rng);
  Rng dummy(0);
  pvmodels::PvStepParams<double> prm;
  prm.phase = binarize::Phase::smooth;
  prm.sampler = &sampler;
  prm.rng = &dummy;
  prm.update = false;

  pvmodels::pv_dbow_step(m, rec, prm, ws);
  std::vector<double> ddoc(m.doc_embeddings.values.size(), 0.0);
  for (int64_t i = 0; i < d_real; ++i)
    ddoc[rec.doc * d_real + i] = ws.dh0[static_cast<size_t>(i)];
  std::vector<double> dw, db;
  output_grads(ws, std::span<const double>(ws.code), classes, dw, db);

  auto loss = [&] { return pv_dbow_step(m, rec, prm, ws, false); };
  auto rep = nncore::finite_diff_check(
      {&m.doc_embeddings, &m.projection, &m.output_weights, &m.output_bias}, loss,
      {ddoc, ws.dproj, dw, db});
  return rep.max_rel_err;
}

double check_dsg(uint64_t seed, bool finetune) {
  Rng rng(seed);
  const size_t vocab = 10;
  const uint32_t k = 3;
  const int64_t d = 5;
  dsg::SenseModel<double> m(vocab, k, d, rng.next_u64());
  randomize(m.outputs, rng);  // zero-init is the training convention; gradcheck
  randomize(m.disambig, rng);  // wants generic positions
  if (finetune) m.broadcast_disambig();

  nncore::LogUniformSampler sampler(random_frequencies(vocab, rng));
  corpus::SgRecord rec;
  rec.center = static_cast<uint32_t>(rng.uniform_int(vocab));
  rec.context = {static_cast<uint32_t>(rng.uniform_int(vocab)),
                 static_cast<uint32_t>(rng.uniform_int(vocab)),
                 static_cast<uint32_t>(rng.uniform_int(vocab))};

  dsg::DsgWorkspace<double> ws;
  nncore::SampledBatch negs;
  negs.draw(sampler, 5, rng);
  std::vector<double> gumbel(k);
  for (auto& g : gumbel) g = rng.gumbel();

  dsg::DsgStepParams<double> prm;
  prm.phase = finetune ? dsg::DsgPhase::finetune : dsg::DsgPhase::pretrain;
  prm.temperature = 0.7;
  prm.gamma = finetune ? 0.15 : 0.3;
  prm.delta = finetune ? 0.1 : 0.2;
  prm.negatives = std::span<const uint32_t>(negs.negatives);
  prm.negative_logq = std::span<const double>(negs.negative_logq);
  prm.sampler = &sampler;
  prm.frozen_gumbel = std::span<const double>(gumbel);
  prm.update = false;

  dsg_record_step(m, rec, prm, ws);
  std::vector<double> dv(m.senses.values.size(), 0.0);
  for (uint32_t s = 0; s < k; ++s)
    for (int64_t i = 0; i < d; ++i)
      dv[(static_cast<size_t>(rec.center) * k + s) * d + i] =
          ws.dv[static_cast<size_t>(s) * d + i];
  std::vector<double> dq(m.disambig.values.size(), 0.0);
  for (uint32_t s = 0; s < k; ++s) {
    size_t row = static_cast<size_t>(m.q_row(rec.center, s));
    for (int64_t i = 0; i < d; ++i)
      dq[row * d + i] = ws.dq[static_cast<size_t>(s) * d + i];
  }
  std::vector<double> du(m.outputs.values.size(), 0.0);
  for (size_t g = 0; g < ws.u_ids.size(); ++g) {
    uint32_t id = ws.u_ids[g];
    const auto& grad = ws.u_grads[ws.u_slot.at(id)];
    for (int64_t i = 0; i < d; ++i) du[id * d + i] += grad[static_cast<size_t>(i)];
  }

  auto loss = [&] { return dsg_record_step(m, rec, prm, ws, /*compute_grads=*/false); };
  auto rep =
      nncore::finite_diff_check({&m.senses, &m.disambig, &m.outputs}, loss, {dv, dq, du});
  return rep.max_rel_err;
}

std::vector<CheckResult> run_suite(uint64_t seed, int instances) {
  std::vector<CheckResult> out;
  auto run = [&](const char* name, auto&& fn) {
    CheckResult r;
    r.name = name;
    r.instances = instances;
    uint64_t stream = fnv1a(name, std::char_traits<char>::length(name));
    for (int i = 0; i < instances; ++i)
      r.max_rel_err = std::max(r.max_rel_err, fn(derive_seed(seed, stream + i)));
    out.push_back(std::move(r));
  };
  run("pvdbow", [](uint64_t s) { return check_pvdbow(s, false); });
  run("pvdbow-coded", [](uint64_t s) { return check_pvdbow(s, true); });
  run("pvdm", [](uint64_t s) { return check_pvdm(s); });
  run("realbinary", [](uint64_t s) { return check_realbinary(s); });
  run("dsg-pretrain", [](uint64_t s) { return check_dsg(s, false); });
  run("dsg-finetune", [](uint64_t s) { return check_dsg(s, true); });
  return out;
}

}  // namespace textvec::gradcheck
