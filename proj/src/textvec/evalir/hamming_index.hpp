#pragma once

// Code table with exact-collision buckets. Radius queries enumerate the
// Hamming ball (flipping up to `radius` bits) when that is cheaper than a
// linear popcount scan; both paths return identical results.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "textvec/binarize/binary_code.hpp"

namespace textvec::evalir {

class HammingIndex {
 public:
  // doc id = position in `codes`; all codes must share one width
  explicit HammingIndex(std::vector<binarize::BinaryCode> codes);

  uint32_t width() const { return width_; }
  size_t size() const { return codes_.size(); }
  const binarize::BinaryCode& lookup(uint32_t doc) const { return codes_.at(doc); }

  // All doc ids with hamming(query, code) <= radius, ascending.
  std::vector<uint32_t> within_radius(const binarize::BinaryCode& query,
                                      uint32_t radius) const;

 private:
  std::vector<uint32_t> bucket_of(const binarize::BinaryCode& code) const;

  std::vector<binarize::BinaryCode> codes_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> buckets_;  // hash -> docs
  uint32_t width_ = 0;
};

}  // namespace textvec::evalir
