#include "textvec/evalir/hamming_index.hpp"

#include <algorithm>
#include <stdexcept>

#include "textvec/common.hpp"

namespace textvec::evalir {

using binarize::BinaryCode;

namespace {

uint64_t code_hash(const BinaryCode& c) {
  return fnv1a(c.words.data(), c.words.size() * sizeof(uint64_t));
}

// Sum of C(width, 0..radius), saturating; estimates ball-enumeration cost.
uint64_t ball_size(uint32_t width, uint32_t radius, uint64_t cap) {
  uint64_t total = 0, binom = 1;
  for (uint32_t r = 0; r <= radius; ++r) {
    total += binom;
    if (total >= cap) return cap;
    binom = binom * (width - r) / (r + 1);
  }
  return total;
}

}  // namespace

HammingIndex::HammingIndex(std::vector<BinaryCode> codes) : codes_(std::move(codes)) {
  if (codes_.empty()) throw std::invalid_argument("hamming index needs at least one code");
  width_ = codes_[0].width;
  for (uint32_t d = 0; d < codes_.size(); ++d) {
    if (codes_[d].width != width_)
      throw std::invalid_argument("hamming index codes have mixed widths");
    buckets_[code_hash(codes_[d])].push_back(d);
  }
}

std::vector<uint32_t> HammingIndex::bucket_of(const BinaryCode& code) const {
  std::vector<uint32_t> out;
  auto it = buckets_.find(code_hash(code));
  if (it == buckets_.end()) return out;
  for (uint32_t d : it->second)
    if (codes_[d] == code) out.push_back(d);
  return out;
}

std::vector<uint32_t> HammingIndex::within_radius(const BinaryCode& query,
                                                  uint32_t radius) const {
  if (query.width != width_)
    throw std::invalid_argument("query code width does not match index");
  std::vector<uint32_t> out;
  if (radius >= width_) {  // whole space
    out.resize(codes_.size());
    for (uint32_t d = 0; d < codes_.size(); ++d) out[d] = d;
    return out;
  }
  if (ball_size(width_, radius, codes_.size()) < codes_.size()) {
    // enumerate the ball: choose up to `radius` bit positions to flip
    BinaryCode probe = query;
    std::vector<uint32_t> flipped;
    auto visit = [&](auto&& self, uint32_t start, uint32_t left) -> void {
      for (uint32_t d : bucket_of(probe)) out.push_back(d);
      if (left == 0) return;
      for (uint32_t b = start; b < width_; ++b) {
        probe.set(b, !probe.get(b));
        self(self, b + 1, left - 1);
        probe.set(b, !probe.get(b));
      }
    };
    visit(visit, 0, radius);
    std::sort(out.begin(), out.end());
  } else {
    for (uint32_t d = 0; d < codes_.size(); ++d)
      if (hamming_distance(query, codes_[d]) <= radius) out.push_back(d);
  }
  return out;
}

}  // namespace textvec::evalir
