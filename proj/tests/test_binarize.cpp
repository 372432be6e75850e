#include <doctest.h>

#include <cmath>

#include "textvec/binarize/binarize.hpp"
#include "textvec/binarize/binary_code.hpp"

using namespace textvec;
using namespace textvec::binarize;

TEST_CASE("binarizer names roundtrip") {
  for (auto k : {BinarizerKind::none, BinarizerKind::krizhevsky, BinarizerKind::gaussian,
                 BinarizerKind::bsn_identity, BinarizerKind::bsn_sigmoid})
    CHECK(binarizer_from_name(binarizer_name(k)) == k);
  CHECK(binarizer_from_name("bsn-identity") == BinarizerKind::bsn_identity);
  CHECK(binarizer_from_name("bsn-sigmoid") == BinarizerKind::bsn_sigmoid);
  CHECK_THROWS(binarizer_from_name("quantize"));
}

TEST_CASE("slope annealing schedule") {
  BinarizationStrategy s;
  s.kind = BinarizerKind::krizhevsky;
  s.anneal = true;
  s.set_epoch(0);
  CHECK(s.slope == doctest::Approx(1.0));
  s.set_epoch(4);
  CHECK(s.slope == doctest::Approx(1.4));
  s.anneal = false;
  s.set_epoch(4);
  CHECK(s.slope == doctest::Approx(1.0));
}

TEST_CASE("none passes values through") {
  BinarizationStrategy s;  // kind none
  CHECK_FALSE(s.active());
  std::vector<double> x{-0.3, 0.8}, out(2);
  s.forward(std::span<const double>(x), std::span<double>(out), Phase::train, nullptr);
  CHECK(out == x);
  std::vector<double> d{1.0, 2.0}, dx(2);
  s.backward(std::span<const double>(d), std::span<const double>(x), std::span<double>(dx));
  CHECK(dx == d);
}

TEST_CASE("rounded sigmoid quantizes in train and infer, stays smooth otherwise") {
  BinarizationStrategy s;
  s.kind = BinarizerKind::krizhevsky;
  std::vector<double> x{-2.0, -0.1, 0.1, 2.0}, out(4);
  for (auto phase : {Phase::train, Phase::infer}) {
    s.forward(std::span<const double>(x), std::span<double>(out), phase, nullptr);
    CHECK(out == std::vector<double>{0.0, 0.0, 1.0, 1.0});
  }
  s.forward(std::span<const double>(x), std::span<double>(out), Phase::smooth, nullptr);
  for (size_t i = 0; i < 4; ++i)
    CHECK(out[i] == doctest::Approx(1.0 / (1.0 + std::exp(-x[i]))));

  // backward is the sigmoid derivative scaled by the slope
  s.slope = 2.0;
  std::vector<double> d{1.0, 1.0, 1.0, 1.0}, dx(4);
  s.backward(std::span<const double>(d), std::span<const double>(x), std::span<double>(dx));
  for (size_t i = 0; i < 4; ++i) {
    double sg = 1.0 / (1.0 + std::exp(-2.0 * x[i]));
    CHECK(dx[i] == doctest::Approx(sg * (1.0 - sg) * 2.0));
  }
}

TEST_CASE("gaussian noise perturbs only the train phase") {
  BinarizationStrategy s;
  s.kind = BinarizerKind::gaussian;
  s.noise_std = 0.4;
  std::vector<double> x{0.0, 0.5}, out(2), smooth(2);
  Rng rng(1);
  s.forward(std::span<const double>(x), std::span<double>(out), Phase::train, &rng);
  s.forward(std::span<const double>(x), std::span<double>(smooth), Phase::smooth, nullptr);
  CHECK(out != smooth);  // noise moved the activations
  for (double v : out) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  s.forward(std::span<const double>(x), std::span<double>(out), Phase::infer, nullptr);
  CHECK(out == std::vector<double>{std::round(0.5), 1.0});

  // same seed, same noise
  Rng r1(9), r2(9);
  std::vector<double> o1(2), o2(2);
  s.forward(std::span<const double>(x), std::span<double>(o1), Phase::train, &r1);
  s.forward(std::span<const double>(x), std::span<double>(o2), Phase::train, &r2);
  CHECK(o1 == o2);
}

TEST_CASE("stochastic units sample bernoulli during training") {
  for (auto kind : {BinarizerKind::bsn_identity, BinarizerKind::bsn_sigmoid}) {
    BinarizationStrategy s;
    s.kind = kind;
    std::vector<double> x(1, 0.0);  // p = 0.5
    std::vector<double> out(1);
    Rng rng(17);
    int ones = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      s.forward(std::span<const double>(x), std::span<double>(out), Phase::train, &rng);
      CHECK((out[0] == 0.0 || out[0] == 1.0));
      ones += out[0] == 1.0;
    }
    CHECK(ones > n / 2 - 150);
    CHECK(ones < n / 2 + 150);
    s.forward(std::span<const double>(x), std::span<double>(out), Phase::infer, nullptr);
    CHECK(out[0] == 1.0);  // round(0.5) away from zero
    s.forward(std::span<const double>(x), std::span<double>(out), Phase::smooth, nullptr);
    CHECK(out[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("straight-through gradients") {
  std::vector<double> x{0.3, -0.7}, d{2.0, -1.5}, dx(2);

  BinarizationStrategy ident;
  ident.kind = BinarizerKind::bsn_identity;
  ident.backward(std::span<const double>(d), std::span<const double>(x), std::span<double>(dx));
  CHECK(dx == d);

  BinarizationStrategy sig;
  sig.kind = BinarizerKind::bsn_sigmoid;
  sig.slope = 1.5;
  sig.backward(std::span<const double>(d), std::span<const double>(x), std::span<double>(dx));
  for (size_t i = 0; i < 2; ++i) {
    double sg = 1.0 / (1.0 + std::exp(-1.5 * x[i]));
    CHECK(dx[i] == doctest::Approx(d[i] * sg * (1.0 - sg) * 1.5));
  }
}

TEST_CASE("binary code bit access and hex roundtrip") {
  BinaryCode c(70);
  CHECK(c.words.size() == 2);
  c.set(0, true);
  c.set(69, true);
  c.set(33, true);
  c.set(33, false);
  CHECK(c.get(0));
  CHECK(c.get(69));
  CHECK_FALSE(c.get(33));
  auto hex = c.to_hex();
  auto back = BinaryCode::from_hex(hex, 70);
  CHECK(back == c);
}

TEST_CASE("from_activations thresholds at one half") {
  std::vector<float> act{0.49f, 0.5f, 0.51f, 0.0f, 1.0f};
  auto c = BinaryCode::from_activations(std::span<const float>(act));
  CHECK(c.width == 5);
  CHECK_FALSE(c.get(0));
  CHECK(c.get(1));
  CHECK(c.get(2));
  CHECK_FALSE(c.get(3));
  CHECK(c.get(4));
}

TEST_CASE("hamming distance counts differing bits") {
  BinaryCode a(16), b(16);
  CHECK(hamming_distance(a, b) == 0);
  a.set(1, true);
  a.set(9, true);
  b.set(9, true);
  b.set(15, true);
  CHECK(hamming_distance(a, b) == 2);
}
