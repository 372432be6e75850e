#include <doctest.h>

#include <cmath>
#include <set>

#include "textvec/common.hpp"
#include "textvec/nncore/gradcheck.hpp"
#include "textvec/nncore/matrix.hpp"
#include "textvec/nncore/sampled_softmax.hpp"
#include "textvec/nncore/sampler.hpp"
#include "textvec/nncore/scalar.hpp"

using namespace textvec;
using namespace textvec::nncore;

TEST_CASE("rng streams are deterministic and independent") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
  }
  CHECK(a.next_u64() != c.next_u64());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("rng ranges") {
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double o = r.uniform01_open();
    CHECK(o > 0.0);
    CHECK(o < 1.0);
    uint64_t k = r.uniform_int(7);
    CHECK(k < 7);
  }
  CHECK_THROWS_AS(r.uniform_int(0), std::invalid_argument);
}

TEST_CASE("normal consumes exactly two uniform draws") {
  Rng a(11), b(11);
  (void)a.normal();
  b.next_u64();
  b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("normal moments are plausible") {
  Rng r(5);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = r.normal(1.0, 2.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 0.05);
  CHECK(std::abs(var - 4.0) < 0.15);
}

TEST_CASE("fnv1a matches the reference test vector") {
  // standard FNV-1a 64-bit value for "a"
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("", 0) == 0xcbf29ce484222325ULL);
}

TEST_CASE("sigmoid is stable at extremes") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(sigmoid(1000.0) == doctest::Approx(1.0));
  CHECK(sigmoid(-1000.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(sigmoid(-1000.0f)));
  CHECK(sigmoid(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}

TEST_CASE("softmax normalizes with max subtraction") {
  std::vector<double> x{1000.0, 1001.0, 999.0};
  softmax_inplace(std::span<double>(x));
  double sum = x[0] + x[1] + x[2];
  CHECK(sum == doctest::Approx(1.0));
  CHECK(x[1] > x[0]);
  CHECK(x[0] > x[2]);
  std::vector<double> empty;
  CHECK_THROWS_AS(softmax_inplace(std::span<double>(empty)), std::invalid_argument);
}

TEST_CASE("entropy and cross entropy") {
  std::vector<double> u{0.5, 0.5};
  CHECK(entropy(std::span<const double>(u)) == doctest::Approx(std::log(2.0)));
  std::vector<double> degenerate{1.0, 0.0};
  CHECK(entropy(std::span<const double>(degenerate)) == doctest::Approx(0.0));
  CHECK(cross_entropy(std::span<const double>(u), std::span<const double>(u)) ==
        doctest::Approx(std::log(2.0)));
  std::vector<double> q{0.25, 0.75};
  CHECK(cross_entropy(std::span<const double>(u), std::span<const double>(q)) ==
        doctest::Approx(-0.5 * std::log(0.25) - 0.5 * std::log(0.75)));
  CHECK_THROWS(cross_entropy(std::span<const double>(degenerate),
                             std::span<const double>(std::vector<double>{0.0, 1.0})));
  std::vector<double> not_prob{0.2, 0.2};
  CHECK_THROWS(entropy(std::span<const double>(not_prob)));
}

TEST_CASE("dot, norm and cosine") {
  std::vector<double> a{3.0, 4.0}, b{4.0, 3.0}, z{0.0, 0.0};
  CHECK(dot(std::span<const double>(a), std::span<const double>(b)) == doctest::Approx(24.0));
  CHECK(norm(std::span<const double>(a)) == doctest::Approx(5.0));
  CHECK(cosine(std::span<const double>(a), std::span<const double>(b)) ==
        doctest::Approx(24.0 / 25.0));
  CHECK_THROWS_AS(cosine(std::span<const double>(a), std::span<const double>(z)),
                  std::invalid_argument);
}

TEST_CASE("matrix init and adagrad step") {
  Matrix<double> m(4, 8);
  Rng rng(2);
  uniform_init(m, rng);
  double half = 0.5 / 8.0;
  for (double v : m.values) {
    CHECK(v >= -half);
    CHECK(v <= half);
  }
  CHECK(m.all_finite());

  Matrix<double> p(1, 2);
  p.values = {1.0, -1.0};
  std::vector<double> g{0.5, 0.0};
  adagrad_update_row(p, 0, std::span<const double>(g), 0.1, 1e-8);
  // accum = g^2, theta -= lr * g / (|g| + eps)
  CHECK(p.values[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)));
  CHECK(p.values[1] == doctest::Approx(-1.0));
  CHECK(p.accum[0] == doctest::Approx(0.25));
}

TEST_CASE("dropout mask values and keep=1") {
  Rng rng(4);
  std::vector<float> mask(1000);
  fill_dropout_mask(std::span<float>(mask), 0.25, rng);
  size_t kept = 0;
  for (float v : mask) {
    CHECK((v == 0.0f || v == 4.0f));
    if (v != 0.0f) ++kept;
  }
  CHECK(kept > 150);
  CHECK(kept < 350);
  fill_dropout_mask(std::span<float>(mask), 1.0, rng);
  for (float v : mask) CHECK(v == 1.0f);
  CHECK_THROWS(fill_dropout_mask(std::span<float>(mask), 0.0, rng));
}

TEST_CASE("log-uniform sampler ranks by frequency and normalizes") {
  std::vector<uint64_t> freq{5, 50, 20, 1};
  LogUniformSampler sampler(freq);
  CHECK(sampler.num_classes() == 4);
  // id 1 is most frequent -> rank 0 -> highest probability
  CHECK(sampler.probability(1) > sampler.probability(2));
  CHECK(sampler.probability(2) > sampler.probability(0));
  CHECK(sampler.probability(0) > sampler.probability(3));
  double total = 0.0;
  for (uint32_t id = 0; id < 4; ++id) total += sampler.probability(id);
  CHECK(total == doctest::Approx(1.0));
  CHECK(sampler.log_probability(1) == doctest::Approx(std::log(sampler.probability(1))));
  CHECK_THROWS(sampler.probability(4));
}

TEST_CASE("sample_distinct excludes and never repeats") {
  std::vector<uint64_t> freq(10, 1);
  LogUniformSampler sampler(freq);
  Rng rng(6);
  for (int it = 0; it < 50; ++it) {
    auto ids = sampler.sample_distinct(5, rng, 3);
    std::set<uint32_t> uniq(ids.begin(), ids.end());
    CHECK(uniq.size() == 5);
    CHECK(uniq.count(3) == 0);
  }
  auto all = sampler.sample_distinct(9, rng, 3);
  CHECK(all.size() == 9);
  CHECK_THROWS(sampler.sample_distinct(10, rng, 3));
  auto no_exclude = sampler.sample_distinct(10, rng, 10);
  CHECK(no_exclude.size() == 10);
}

TEST_CASE("sampled softmax loss matches a direct computation") {
  Matrix<double> w(3, 2);
  w.values = {0.1, 0.2, -0.3, 0.4, 0.5, -0.6};
  std::vector<double> bias{0.01, -0.02, 0.03};
  std::vector<double> h{1.0, -2.0};
  std::vector<uint32_t> cands{2, 0, 1};
  std::vector<double> logq{-1.0, -0.5, -2.0};

  SampledSoftmax<double> ss;
  double loss = ss.forward(std::span<const double>(h), std::span<const uint32_t>(cands), w,
                           std::span<const double>(bias), std::span<const double>(logq));

  std::vector<double> logits(3);
  for (size_t j = 0; j < 3; ++j) {
    auto row = w.row(cands[j]);
    logits[j] = h[0] * row[0] + h[1] * row[1] + bias[cands[j]] - logq[j];
  }
  double mx = std::max({logits[0], logits[1], logits[2]});
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  double expect = -(logits[0] - mx - std::log(z));
  CHECK(loss == doctest::Approx(expect));

  // coeff sums to zero across candidates holding the softmax identity
  double csum = 0.0;
  for (size_t j = 0; j < 3; ++j) csum += ss.coeff(j);
  CHECK(csum == doctest::Approx(0.0));
  CHECK(ss.coeff(0) < 0.0);
}

TEST_CASE("finite difference harness flags a wrong gradient") {
  Matrix<double> p(1, 1);
  p.values = {0.7};
  auto loss = [&] { return p.values[0] * p.values[0]; };
  GradCheckReport good = finite_diff_check({&p}, loss, {{2.0 * p.values[0]}});
  CHECK(good.max_rel_err < 1e-6);
  GradCheckReport bad = finite_diff_check({&p}, loss, {{0.5}});
  CHECK(bad.max_rel_err > 0.1);
}
