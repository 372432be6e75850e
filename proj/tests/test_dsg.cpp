#include <doctest.h>

#include <cmath>
#include <span>
#include <vector>

#include "common/pipeline.hpp"
#include "common/tmpdir.hpp"
#include "textvec/dsg/model.hpp"
#include "textvec/dsg/model_io.hpp"
#include "textvec/dsg/queries.hpp"
#include "textvec/dsg/train.hpp"

using namespace textvec;
using namespace textvec::dsg;
using testutil::Docs;

namespace {

Docs random_docs(size_t n_docs, size_t len, size_t vocab_words, uint64_t seed) {
  Docs docs;
  Rng rng(seed);
  for (size_t i = 0; i < n_docs; ++i) {
    std::vector<std::string> doc;
    for (size_t j = 0; j < len; ++j)
      doc.push_back("w" + std::to_string(rng.uniform_int(vocab_words)));
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

TEST_CASE("sense model construction") {
  SenseModel<float> m(7, 3, 4, 5);
  CHECK(m.vocab() == 7);
  CHECK(m.k == 3);
  CHECK(m.d == 4);
  CHECK(m.senses.rows == 21);
  CHECK(m.outputs.rows == 7);
  CHECK(m.disambig.rows == 3);
  CHECK(m.disambig_shared);
  for (int64_t w = 0; w < 7; ++w)
    for (uint32_t s = 0; s < 3; ++s)
      CHECK(m.marginals.row(w)[s] == doctest::Approx(1.0 / 3.0));
  for (uint8_t a : m.active) CHECK(a == 1);
  for (uint8_t kn : m.marginal_known) CHECK(kn == 0);
  for (float v : m.outputs.values) CHECK(v == 0.0f);
  CHECK_THROWS(SenseModel<float>(7, 0, 4, 5));
}

TEST_CASE("broadcast turns the shared disambiguation block into per-word rows") {
  SenseModel<float> m(5, 2, 3, 11);
  std::vector<float> q0(m.disambig.row(0).begin(), m.disambig.row(0).end());
  std::vector<float> q1(m.disambig.row(1).begin(), m.disambig.row(1).end());
  m.broadcast_disambig();
  CHECK_FALSE(m.disambig_shared);
  CHECK(m.disambig.rows == 10);
  for (uint32_t w = 0; w < 5; ++w) {
    auto a = m.q(w, 0);
    auto b = m.q(w, 1);
    CHECK(std::equal(a.begin(), a.end(), q0.begin()));
    CHECK(std::equal(b.begin(), b.end(), q1.begin()));
  }
  CHECK_THROWS(m.broadcast_disambig());
}

TEST_CASE("context vector is the mean of the tied context embeddings") {
  SenseModel<float> m(3, 1, 2, 1);
  m.outputs.row(0)[0] = 1.0f;
  m.outputs.row(0)[1] = 2.0f;
  m.outputs.row(2)[0] = 3.0f;
  m.outputs.row(2)[1] = -4.0f;
  std::vector<uint32_t> ctx{0, 2};
  std::vector<float> rbar(2);
  context_vector(m, std::span<const uint32_t>(ctx), std::span<float>(rbar));
  CHECK(rbar[0] == doctest::Approx(2.0));
  CHECK(rbar[1] == doctest::Approx(-1.0));
  std::vector<uint32_t> empty;
  CHECK_THROWS(context_vector(m, std::span<const uint32_t>(empty), std::span<float>(rbar)));
}

TEST_CASE("sense posterior is a softmax over disambiguation dots") {
  SenseModel<float> m(2, 2, 2, 1);
  // word 1, shared q rows: q0 = (1, 0), q1 = (0, 1)
  m.disambig.row(0)[0] = 1.0f;
  m.disambig.row(0)[1] = 0.0f;
  m.disambig.row(1)[0] = 0.0f;
  m.disambig.row(1)[1] = 1.0f;
  std::vector<float> rbar{0.5f, -0.5f};
  std::vector<float> p(2);
  sense_posterior(m, 1, std::span<const float>(rbar), std::span<float>(p));
  double e0 = std::exp(0.5), e1 = std::exp(-0.5);
  CHECK(p[0] == doctest::Approx(e0 / (e0 + e1)));
  CHECK(p[1] == doctest::Approx(e1 / (e0 + e1)));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
}

TEST_CASE("gumbel-softmax sampling") {
  std::vector<float> p1{1.0f};
  std::vector<float> z1(1);
  Rng r(7);
  gumbel_softmax_sample(std::span<const float>(p1), 0.5, 1e-8, r, std::span<float>(z1));
  CHECK(z1[0] == 1.0f);
  Rng fresh(7);
  CHECK(r.next_u64() == fresh.next_u64());  // k=1 consumed no draws

  CHECK_THROWS(gumbel_softmax_sample(std::span<const float>(p1), 0.0, 1e-8, r,
                                     std::span<float>(z1)));

  std::vector<float> p{0.7f, 0.2f, 0.1f};
  std::vector<float> za(3), zb(3), zc(3);
  Rng ra(3), rb(3), rc(4);
  gumbel_softmax_sample(std::span<const float>(p), 1.0, 1e-8, ra, std::span<float>(za));
  gumbel_softmax_sample(std::span<const float>(p), 1.0, 1e-8, rb, std::span<float>(zb));
  gumbel_softmax_sample(std::span<const float>(p), 1.0, 1e-8, rc, std::span<float>(zc));
  double sum = za[0] + za[1] + za[2];
  CHECK(sum == doctest::Approx(1.0));
  CHECK(za == zb);
  CHECK(za != zc);

  // low temperature concentrates the mass
  Rng rt(9);
  std::vector<float> zt(3);
  gumbel_softmax_sample(std::span<const float>(p), 0.01, 1e-8, rt, std::span<float>(zt));
  float mx = std::max({zt[0], zt[1], zt[2]});
  CHECK(mx > 0.95f);
}

TEST_CASE("weighted sense sum mixes sense vectors") {
  SenseModel<float> m(2, 2, 2, 1);
  auto v0 = m.sense(1, 0);
  v0[0] = 2.0f;
  v0[1] = 0.0f;
  auto v1 = m.sense(1, 1);
  v1[0] = 0.0f;
  v1[1] = 4.0f;
  std::vector<float> w{0.25f, 0.75f};
  std::vector<float> out(2);
  weighted_sense_sum(m, 1, std::span<const float>(w), std::span<float>(out));
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(3.0));
}

TEST_CASE("huber penalty") {
  double dx = 0.0;
  CHECK(huber(0.5, &dx) == doctest::Approx(0.125));
  CHECK(dx == doctest::Approx(0.5));
  CHECK(huber(2.0, &dx) == doctest::Approx(1.5));
  CHECK(dx == doctest::Approx(1.0));
  CHECK(huber(-3.0, &dx) == doctest::Approx(2.5));
  CHECK(dx == doctest::Approx(-1.0));

  SenseModel<float> single(3, 1, 2, 1);
  CHECK(huber_parallel_penalty(single, 0, &dx) == 0.0);
  CHECK(dx == 0.0);

  SenseModel<float> m(2, 2, 2, 1);
  auto a = m.sense(0, 0);
  auto b = m.sense(0, 1);
  // parallel: x = |v0+v1|^2 - (|v0|^2+|v1|^2) = 4 - 2 = 2 -> linear branch
  a[0] = 1.0f; a[1] = 0.0f;
  b[0] = 1.0f; b[1] = 0.0f;
  CHECK(huber_parallel_penalty(m, 0, &dx) == doctest::Approx(1.5));
  CHECK(dx == doctest::Approx(1.0));
  // orthogonal: x = 0 -> no penalty
  b[0] = 0.0f; b[1] = 1.0f;
  CHECK(huber_parallel_penalty(m, 0, &dx) == doctest::Approx(0.0));
  CHECK(dx == doctest::Approx(0.0));
}

TEST_CASE("phase preconditions") {
  testutil::TmpDir tmp("dsgphase");
  auto docs = random_docs(6, 6, 8, 21);
  auto vocab = testutil::build_vocab(docs);
  auto path = testutil::make_store(docs, vocab, corpus::StoreVariant::sg, 2, true, false, 5,
                                   tmp.path().string());
  auto store = corpus::ExampleStore::open(path);
  nncore::LogUniformSampler sampler(vocab.frequencies());
  DsgTrainConfig cfg;
  cfg.negatives = 4;

  SenseModel<float> broadcasted(vocab.size(), 2, 4, 1);
  broadcasted.broadcast_disambig();
  CHECK_THROWS(dsg_pretrain(broadcasted, store, sampler, cfg));

  SenseModel<float> shared(vocab.size(), 2, 4, 1);
  CHECK_THROWS(dsg_finetune(shared, store, sampler, cfg));
}

TEST_CASE("sense training is deterministic end to end") {
  testutil::TmpDir tmp("dsgtrain");
  auto docs = random_docs(30, 8, 14, 33);
  auto vocab = testutil::build_vocab(docs);
  auto path = testutil::make_store(docs, vocab, corpus::StoreVariant::sg, 2, true, false, 5,
                                   tmp.path().string());
  auto store = corpus::ExampleStore::open(path);
  nncore::LogUniformSampler sampler(vocab.frequencies());
  DsgTrainConfig cfg;
  cfg.negatives = 8;
  cfg.gamma = 0.25;
  cfg.delta = 0.001;
  cfg.seed = 2;

  auto run = [&](SenseModel<float>& m) {
    std::vector<double> losses;
    losses.push_back(dsg_pretrain(m, store, sampler, cfg));
    m.broadcast_disambig();
    auto ft = dsg_finetune(m, store, sampler, cfg);
    losses.insert(losses.end(), ft.begin(), ft.end());
    return losses;
  };
  SenseModel<float> m1(vocab.size(), 2, 8, 4);
  auto l1 = run(m1);
  SenseModel<float> m2(vocab.size(), 2, 8, 4);
  auto l2 = run(m2);
  REQUIRE(l1.size() == 1 + cfg.finetune_lrs.size());
  for (double l : l1) CHECK(std::isfinite(l));
  CHECK(l1 == l2);
  CHECK(m1.senses.same_values(m2.senses));
  CHECK(m1.outputs.same_values(m2.outputs));
  CHECK(m1.disambig.same_values(m2.disambig));
  CHECK(m1.senses.all_finite());
  CHECK(m1.outputs.all_finite());

  // marginal estimation: corpus words known and normalized, padding words not
  SenseModel<float> wide(vocab.size() + 2, 2, 8, 4);
  estimate_marginals(wide, store);
  for (size_t w = 0; w < vocab.size(); ++w) {
    CHECK(wide.marginal_known[w] == 1);
    CHECK(wide.marginals.row(static_cast<int64_t>(w))[0] +
              wide.marginals.row(static_cast<int64_t>(w))[1] ==
          doctest::Approx(1.0).epsilon(1e-5));
  }
  CHECK(wide.marginal_known[vocab.size()] == 0);
  CHECK(wide.marginals.row(static_cast<int64_t>(vocab.size()))[0] == doctest::Approx(0.5));
}

TEST_CASE("pruning keeps senses at or above the threshold, rescuing the argmax") {
  SenseModel<float> m(3, 3, 2, 1);
  auto set = [&](uint32_t w, float a, float b, float c) {
    m.marginals.row(w)[0] = a;
    m.marginals.row(w)[1] = b;
    m.marginals.row(w)[2] = c;
  };
  set(0, 0.25f, 0.5f, 0.1f);    // boundary: 0.25 kept (>=), 0.1 dropped
  set(1, 0.02f, 0.01f, 0.97f);  // one survivor
  set(2, 0.10f, 0.15f, 0.05f);  // all below: argmax rescued
  double mean = prune_senses(m, 0.25);
  CHECK(m.sense_active(0, 0));
  CHECK(m.sense_active(0, 1));
  CHECK_FALSE(m.sense_active(0, 2));
  CHECK_FALSE(m.sense_active(1, 0));
  CHECK_FALSE(m.sense_active(1, 1));
  CHECK(m.sense_active(1, 2));
  CHECK_FALSE(m.sense_active(2, 0));
  CHECK(m.sense_active(2, 1));
  CHECK_FALSE(m.sense_active(2, 2));
  CHECK(mean == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("plain skip-gram path refuses multi-sense models") {
  SenseModel<float> m(4, 2, 3, 1);
  corpus::SgRecord rec;
  rec.center = 0;
  rec.context = {1, 2};
  DsgStepParams<float> prm;
  DsgWorkspace<float> ws;
  CHECK_THROWS(sg_record_step(m, rec, prm, ws));
}

TEST_CASE("sense model serialization roundtrip") {
  testutil::TmpDir tmp("dsgio");
  for (bool broadcast : {false, true}) {
    SenseModel<float> m(6, 2, 4, 9);
    if (broadcast) m.broadcast_disambig();
    m.vocab_hash = 0xabcdULL;
    m.marginals.row(3)[0] = 0.9f;
    m.marginals.row(3)[1] = 0.1f;
    m.marginal_known[3] = 1;
    m.active[3 * 2 + 1] = 0;
    std::string path = tmp.file(broadcast ? "b.dsgm" : "s.dsgm");
    save_sense_model(m, path);
    auto back = load_sense_model<float>(path);
    CHECK(back.k == m.k);
    CHECK(back.d == m.d);
    CHECK(back.vocab() == m.vocab());
    CHECK(back.vocab_hash == m.vocab_hash);
    CHECK(back.disambig_shared == m.disambig_shared);
    CHECK(back.senses.same_values(m.senses));
    CHECK(back.outputs.same_values(m.outputs));
    CHECK(back.disambig.same_values(m.disambig));
    CHECK(back.marginals.same_values(m.marginals));
    CHECK(back.marginal_known == m.marginal_known);
    CHECK(back.active == m.active);
    CHECK_THROWS(load_sense_model<double>(path));
  }
}

TEST_CASE("edit distance and spelling suggestions") {
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("abc", "") == 3);
  CHECK(edit_distance("abc", "abc") == 0);
  CHECK(edit_distance("abc", "abd") == 1);

  Docs docs{{"apple", "apply", "maple", "apple", "apply", "banana"}};
  auto vocab = testutil::build_vocab(docs);
  auto near = closest_spellings(vocab, "appl", 2);
  REQUIRE(near.size() == 2);
  CHECK(near[0] == "apple");  // distance 1; "apply" also 1, tie broken by surface
  CHECK(near[1] == "apply");
  CHECK(require_word(vocab, "banana") == *vocab.id("banana"));
  CHECK_THROWS_WITH_AS(require_word(vocab, "bananna"),
                       doctest::Contains("did you mean"), std::runtime_error);
}

TEST_CASE("nearest senses ranks by cosine over active senses of other words") {
  SenseModel<float> m(4, 2, 2, 1);
  auto set = [&](uint32_t w, uint32_t s, float x, float y) {
    auto v = m.sense(w, s);
    v[0] = x;
    v[1] = y;
  };
  set(0, 0, 1.0f, 0.0f);   // query
  set(0, 1, 1.0f, 0.0f);   // same word: never a candidate
  set(1, 0, 2.0f, 0.0f);   // cos 1.0
  set(1, 1, 1.0f, 1.0f);   // cos ~0.7071
  set(2, 0, 0.0f, 1.0f);   // cos 0
  set(2, 1, 1.0f, 0.5f);   // cos ~0.8944
  set(3, 0, -1.0f, 0.0f);  // cos -1
  set(3, 1, 0.5f, 0.0f);   // cos 1.0 (tie with (1,0): word asc wins)

  auto top = nearest_senses(m, 0, 0, 10);
  REQUIRE(top.size() == 6);
  CHECK(top[0].word == 1);
  CHECK(top[0].sense == 0);
  CHECK(top[0].score == doctest::Approx(1.0));
  CHECK(top[1].word == 3);
  CHECK(top[1].sense == 1);
  CHECK(top[2].word == 2);
  CHECK(top[2].sense == 1);
  CHECK(top[2].score == doctest::Approx(1.0 / std::sqrt(1.25)));
  CHECK(top[3].word == 1);
  CHECK(top[3].sense == 1);
  CHECK(top[4].word == 2);
  CHECK(top[4].sense == 0);
  CHECK(top[5].word == 3);
  CHECK(top[5].sense == 0);
  CHECK(top[5].score == doctest::Approx(-1.0));

  auto merged = nearest_senses(m, 0, 0, 10, /*merge_senses=*/true);
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].word == 1);
  CHECK(merged[0].sense == 0);
  CHECK(merged[1].word == 3);
  CHECK(merged[1].sense == 1);
  CHECK(merged[2].word == 2);
  CHECK(merged[2].sense == 1);

  m.active[1 * 2 + 0] = 0;  // deactivate (1,0)
  auto pruned = nearest_senses(m, 0, 0, 10);
  REQUIRE(pruned.size() == 5);
  CHECK(pruned[0].word == 3);
  CHECK(pruned[0].sense == 1);

  CHECK(nearest_senses(m, 0, 0, 2).size() == 2);
  CHECK_THROWS(nearest_senses(m, 9, 0, 3));
  CHECK_THROWS(nearest_senses(m, 0, 5, 3));
}
