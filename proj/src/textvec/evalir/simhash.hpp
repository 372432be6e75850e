#pragma once

// Random-hyperplane hashing baseline: bit_i = 1 iff h_i . x >= 0 with h_i
// drawn once from a seeded standard normal.

#include <cstdint>
#include <span>
#include <vector>

#include "textvec/binarize/binary_code.hpp"

namespace textvec::evalir {

class SimHash {
 public:
  SimHash(size_t dim, uint32_t bits, uint64_t seed);

  binarize::BinaryCode code(std::span<const double> x) const;

  size_t dim() const { return dim_; }
  uint32_t bits() const { return bits_; }

 private:
  size_t dim_;
  uint32_t bits_;
  std::vector<double> planes_;  // bits x dim, row-major
};

}  // namespace textvec::evalir
