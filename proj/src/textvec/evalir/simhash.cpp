#include "textvec/evalir/simhash.hpp"

#include <stdexcept>

#include "textvec/common.hpp"

namespace textvec::evalir {

SimHash::SimHash(size_t dim, uint32_t bits, uint64_t seed) : dim_(dim), bits_(bits) {
  if (dim == 0 || bits == 0) throw std::invalid_argument("simhash needs dim > 0, bits > 0");
  planes_.resize(static_cast<size_t>(bits) * dim);
  Rng rng(seed);
  for (auto& v : planes_) v = rng.normal();
}

binarize::BinaryCode SimHash::code(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("simhash: vector dimension mismatch");
  binarize::BinaryCode c(bits_);
  for (uint32_t b = 0; b < bits_; ++b) {
    const double* row = planes_.data() + static_cast<size_t>(b) * dim_;
    double dot = 0.0;
    for (size_t i = 0; i < dim_; ++i) dot += row[i] * x[i];
    if (dot >= 0.0) c.set(b, true);
  }
  return c;
}

}  // namespace textvec::evalir
