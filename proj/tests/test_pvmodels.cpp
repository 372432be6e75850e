#include <doctest.h>

#include <cmath>
#include <cstring>
#include <span>

#include "common/pipeline.hpp"
#include "common/tmpdir.hpp"
#include "textvec/pvmodels/model.hpp"
#include "textvec/pvmodels/train.hpp"

using namespace textvec;
using namespace textvec::pvmodels;
using testutil::Docs;

namespace {

binarize::BinarizationStrategy strategy(binarize::BinarizerKind kind, bool anneal = false) {
  binarize::BinarizationStrategy s;
  s.kind = kind;
  s.anneal = anneal;
  return s;
}

// Two topics with disjoint vocabularies; ten distinct words each.
Docs topic_docs(size_t per_topic, size_t len) {
  Docs docs;
  Rng rng(99);
  for (size_t t = 0; t < 2; ++t)
    for (size_t i = 0; i < per_topic; ++i) {
      std::vector<std::string> doc;
      for (size_t j = 0; j < len; ++j)
        doc.push_back((t == 0 ? "alpha" : "beta") + std::to_string(rng.uniform_int(10)));
      docs.push_back(std::move(doc));
    }
  return docs;
}

}  // namespace

TEST_CASE("model constructors lay out the expected shapes") {
  auto dbow = make_pvdbow<float>(10, 8, 20, strategy(binarize::BinarizerKind::none), 1);
  CHECK(dbow.num_docs() == 10);
  CHECK(dbow.num_classes() == 20);
  CHECK(dbow.rep_width() == 8);
  CHECK(dbow.input_width() == 8);
  CHECK(dbow.output_weights.cols == 8);
  CHECK(dbow.output_bias.rows == 20);
  // softmax starts at zero, embeddings do not
  for (float v : dbow.output_weights.values) CHECK(v == 0.0f);
  bool any = false;
  for (float v : dbow.doc_embeddings.values) any = any || v != 0.0f;
  CHECK(any);

  auto dm1 = make_pvdm<float>(4, 6, 5, 30, 2, true, strategy(binarize::BinarizerKind::none), 1);
  CHECK(dm1.context_len() == 2);
  CHECK(dm1.input_width() == 6 + 2 * 5);
  auto dm2 = make_pvdm<float>(4, 6, 5, 30, 2, false, strategy(binarize::BinarizerKind::none), 1);
  CHECK(dm2.context_len() == 4);
  CHECK(dm2.input_width() == 6 + 4 * 5);
  CHECK_THROWS(make_pvdm<float>(4, 6, 5, 30, 0, true,
                                strategy(binarize::BinarizerKind::none), 1));

  auto rb = make_realbinary<float>(4, 10, 8, 20, strategy(binarize::BinarizerKind::krizhevsky), 1);
  CHECK(rb.rep_width() == 8);
  CHECK(rb.input_width() == 8);
  CHECK(rb.projection.rows == 10);
  CHECK_THROWS(make_realbinary<float>(4, 10, 8, 20, strategy(binarize::BinarizerKind::none), 1));
}

TEST_CASE("seeded construction is reproducible") {
  auto a = make_pvdbow<float>(5, 8, 10, strategy(binarize::BinarizerKind::krizhevsky), 42);
  auto b = make_pvdbow<float>(5, 8, 10, strategy(binarize::BinarizerKind::krizhevsky), 42);
  auto c = make_pvdbow<float>(5, 8, 10, strategy(binarize::BinarizerKind::krizhevsky), 43);
  CHECK(a.doc_embeddings.same_values(b.doc_embeddings));
  CHECK_FALSE(a.doc_embeddings.same_values(c.doc_embeddings));
}

TEST_CASE("model save/load roundtrip") {
  testutil::TmpDir tmp("pvio");
  for (int variant = 0; variant < 3; ++variant) {
    PvModel<float> m;
    if (variant == 0)
      m = make_pvdbow<float>(6, 8, 15, strategy(binarize::BinarizerKind::bsn_identity, true), 5);
    else if (variant == 1)
      m = make_pvdm<float>(6, 8, 4, 15, 2, false, strategy(binarize::BinarizerKind::none), 5);
    else
      m = make_realbinary<float>(6, 8, 4, 15, strategy(binarize::BinarizerKind::gaussian), 5);
    m.vocab_hash = 0xfeedULL;
    m.binarizer.slope = 1.3;
    std::string path = tmp.file("m" + std::to_string(variant) + ".bin");
    save_pv_model(m, path);
    auto back = load_pv_model<float>(path);
    CHECK(back.kind == m.kind);
    CHECK(back.vocab_hash == m.vocab_hash);
    CHECK(back.binarizer.kind == m.binarizer.kind);
    CHECK(back.binarizer.anneal == m.binarizer.anneal);
    CHECK(back.binarizer.slope == m.binarizer.slope);
    CHECK(back.window == m.window);
    CHECK(back.one_sided == m.one_sided);
    CHECK(back.doc_embeddings.same_values(m.doc_embeddings));
    CHECK(back.word_embeddings.same_values(m.word_embeddings));
    CHECK(back.projection.same_values(m.projection));
    CHECK(back.output_weights.same_values(m.output_weights));
    CHECK(back.output_bias.same_values(m.output_bias));
    CHECK_THROWS(load_pv_model<double>(path));  // precision mismatch refused
  }
}

TEST_CASE("dbow training reduces the loss deterministically") {
  testutil::TmpDir tmp("pvtrain");
  auto docs = topic_docs(15, 12);
  auto vocab = testutil::build_vocab(docs);
  auto store_path = testutil::make_store(docs, vocab, corpus::StoreVariant::dbow, 0, true,
                                         false, 7, tmp.path().string());
  auto store = corpus::ExampleStore::open(store_path);
  nncore::LogUniformSampler sampler(vocab.frequencies());

  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.learning_rate = 0.3;
  cfg.negatives = 10;
  cfg.seed = 1;

  auto m1 = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                               static_cast<int64_t>(vocab.size()),
                               strategy(binarize::BinarizerKind::none), 1);
  auto losses1 = train_pv(m1, store, sampler, cfg);
  REQUIRE(losses1.size() == 4);
  CHECK(losses1.back() < losses1.front());
  for (double l : losses1) CHECK(std::isfinite(l));
  CHECK(m1.doc_embeddings.all_finite());

  auto m2 = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                               static_cast<int64_t>(vocab.size()),
                               strategy(binarize::BinarizerKind::none), 1);
  auto losses2 = train_pv(m2, store, sampler, cfg);
  CHECK(losses1 == losses2);
  CHECK(m1.doc_embeddings.same_values(m2.doc_embeddings));
  CHECK(m1.output_weights.same_values(m2.output_weights));
}

TEST_CASE("every binarizer and model kind trains to finite parameters") {
  testutil::TmpDir tmp("pvkinds");
  auto docs = topic_docs(8, 10);
  auto vocab = testutil::build_vocab(docs);
  auto dbow_path = testutil::make_store(docs, vocab, corpus::StoreVariant::dbow, 0, true,
                                        false, 7, tmp.path().string(), "dbow");
  auto dm_path = testutil::make_store(docs, vocab, corpus::StoreVariant::dm, 2, true, false,
                                      7, tmp.path().string(), "dm");
  auto dbow_store = corpus::ExampleStore::open(dbow_path);
  auto dm_store = corpus::ExampleStore::open(dm_path);
  nncore::LogUniformSampler sampler(vocab.frequencies());

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.negatives = 8;
  cfg.dropout_keep = 0.8;

  for (auto kind : {binarize::BinarizerKind::krizhevsky, binarize::BinarizerKind::gaussian,
                    binarize::BinarizerKind::bsn_identity,
                    binarize::BinarizerKind::bsn_sigmoid}) {
    auto m = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                                static_cast<int64_t>(vocab.size()), strategy(kind, true), 1);
    auto losses = train_pv(m, dbow_store, sampler, cfg);
    for (double l : losses) CHECK(std::isfinite(l));
    CHECK(m.doc_embeddings.all_finite());
    auto codes = all_binary_codes(m, m.doc_embeddings);
    CHECK(codes.size() == docs.size());
    CHECK(codes[0].width == 8);
  }

  auto dm = make_pvdm<float>(static_cast<int64_t>(docs.size()), 8, 4,
                             static_cast<int64_t>(vocab.unigram_count()), 2, true,
                             strategy(binarize::BinarizerKind::krizhevsky), 1);
  auto dm_losses = train_pv(dm, dm_store, sampler, cfg);
  for (double l : dm_losses) CHECK(std::isfinite(l));
  CHECK(dm.word_embeddings.all_finite());

  auto rb = make_realbinary<float>(static_cast<int64_t>(docs.size()), 8, 6,
                                   static_cast<int64_t>(vocab.size()),
                                   strategy(binarize::BinarizerKind::krizhevsky), 1);
  auto rb_losses = train_pv(rb, dbow_store, sampler, cfg);
  for (double l : rb_losses) CHECK(std::isfinite(l));
  auto rb_codes = all_binary_codes(rb, rb.doc_embeddings);
  CHECK(rb_codes[0].width == 6);
}

TEST_CASE("store/model shape mismatches are rejected") {
  testutil::TmpDir tmp("pvmismatch");
  auto docs = topic_docs(4, 8);
  auto vocab = testutil::build_vocab(docs);
  auto dm_path = testutil::make_store(docs, vocab, corpus::StoreVariant::dm, 2, true, false,
                                      7, tmp.path().string(), "dm");
  auto dm_store = corpus::ExampleStore::open(dm_path);
  nncore::LogUniformSampler sampler(vocab.frequencies());
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.negatives = 4;

  auto dbow = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                                 static_cast<int64_t>(vocab.size()),
                                 strategy(binarize::BinarizerKind::none), 1);
  CHECK_THROWS(train_pv(dbow, dm_store, sampler, cfg));

  auto dm_wrong = make_pvdm<float>(static_cast<int64_t>(docs.size()), 8, 4,
                                   static_cast<int64_t>(vocab.unigram_count()), 3, true,
                                   strategy(binarize::BinarizerKind::none), 1);
  CHECK_THROWS(train_pv(dm_wrong, dm_store, sampler, cfg));
}

TEST_CASE("inference freezes everything except the new document rows") {
  testutil::TmpDir tmp("pvinfer");
  auto docs = topic_docs(10, 10);
  auto vocab = testutil::build_vocab(docs);
  auto train_path = testutil::make_store(docs, vocab, corpus::StoreVariant::dbow, 0, true,
                                         false, 7, tmp.path().string(), "train");
  auto train_store = corpus::ExampleStore::open(train_path);
  nncore::LogUniformSampler sampler(vocab.frequencies());
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.negatives = 8;
  auto m = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                              static_cast<int64_t>(vocab.size()),
                              strategy(binarize::BinarizerKind::krizhevsky), 1);
  train_pv(m, train_store, sampler, cfg);

  // held-out docs: two normal, one entirely out-of-vocabulary
  Docs held = {docs[0], docs[docs.size() - 1], {"zzz", "qqq"}};
  auto held_path = testutil::make_store(held, vocab, corpus::StoreVariant::dbow, 0, true,
                                        false, 11, tmp.path().string(), "held");
  auto held_store = corpus::ExampleStore::open(held_path);

  auto weights_before = m.output_weights.values;
  auto bias_before = m.output_bias.values;
  auto docs_before = m.doc_embeddings.values;
  TrainConfig icfg = cfg;
  icfg.seed = 23;
  icfg.infer_epochs = 2;
  auto result = infer_embeddings(m, held_store, 3, sampler, icfg);
  CHECK(result.embeddings.rows == 3);
  CHECK(result.epoch_losses.size() == 2);
  CHECK(m.output_weights.values == weights_before);
  CHECK(m.output_bias.values == bias_before);
  CHECK(m.doc_embeddings.values == docs_before);
  CHECK(result.seen[0] == 1);
  CHECK(result.seen[1] == 1);
  CHECK(result.seen[2] == 0);  // OOV doc produced no records

  // rerun is bit-identical
  auto result2 = infer_embeddings(m, held_store, 3, sampler, icfg);
  CHECK(result.embeddings.same_values(result2.embeddings));
}

TEST_CASE("code extraction") {
  auto rb = make_realbinary<float>(2, 3, 2, 5, strategy(binarize::BinarizerKind::krizhevsky), 1);
  rb.projection.values = {1.0f, 0.0f, 0.0f, 1.0f, 1.0f, -1.0f};  // 3x2
  std::vector<float> emb{1.0f, 2.0f, 3.0f};
  auto act = code_activations(rb, std::span<const float>(emb));
  REQUIRE(act.size() == 2);
  CHECK(act[0] == doctest::Approx(1.0f * 1.0f + 2.0f * 0.0f + 3.0f * 1.0f));
  CHECK(act[1] == doctest::Approx(1.0f * 0.0f + 2.0f * 1.0f + 3.0f * -1.0f));
  auto code = doc_binary_code(rb, std::span<const float>(emb));
  CHECK(code.width == 2);
  CHECK(code.get(0));        // sigmoid(4) rounds to 1
  CHECK_FALSE(code.get(1));  // sigmoid(-1) rounds to 0

  auto plain = make_pvdbow<float>(2, 4, 5, strategy(binarize::BinarizerKind::none), 1);
  std::vector<float> e2{0.1f, 0.2f, 0.3f, 0.4f};
  CHECK_THROWS(doc_binary_code(plain, std::span<const float>(e2)));
}

TEST_CASE("negative draws larger than the class count are rejected") {
  testutil::TmpDir tmp("pvnegs");
  auto docs = topic_docs(3, 6);
  auto vocab = testutil::build_vocab(docs);
  auto path = testutil::make_store(docs, vocab, corpus::StoreVariant::dbow, 0, true, false, 7,
                                   tmp.path().string());
  auto store = corpus::ExampleStore::open(path);
  nncore::LogUniformSampler sampler(vocab.frequencies());
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.negatives = vocab.size() + 5;
  auto m = make_pvdbow<float>(static_cast<int64_t>(docs.size()), 8,
                              static_cast<int64_t>(vocab.size()),
                              strategy(binarize::BinarizerKind::none), 1);
  CHECK_THROWS(train_pv(m, store, sampler, cfg));
}
