#pragma once

// Packed binary code of a document: `width` bits in little-endian 64-bit
// words (bit i of the code is word i/64, bit i%64).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace textvec::binarize {

struct BinaryCode {
  uint32_t width = 0;
  std::vector<uint64_t> words;

  BinaryCode() = default;
  explicit BinaryCode(uint32_t w) : width(w), words((w + 63) / 64, 0) {}

  bool get(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
  void set(uint32_t i, bool v) {
    uint64_t mask = 1ULL << (i & 63);
    if (v)
      words[i >> 6] |= mask;
    else
      words[i >> 6] &= ~mask;
  }

  bool operator==(const BinaryCode& o) const = default;

  // Activations >= 0.5 become 1-bits. Used on coding-layer outputs, whose
  // entries are already in [0,1].
  template <typename T>
  static BinaryCode from_activations(std::span<const T> act) {
    BinaryCode c(static_cast<uint32_t>(act.size()));
    for (uint32_t i = 0; i < c.width; ++i)
      if (static_cast<double>(act[i]) >= 0.5) c.set(i, true);
    return c;
  }

  std::string to_hex() const;
  static BinaryCode from_hex(const std::string& hex, uint32_t width);
};

uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b);

}  // namespace textvec::binarize
