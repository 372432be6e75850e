#include "textvec/binarize/binary_code.hpp"

#include <bit>

namespace textvec::binarize {

namespace {
int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument(std::string("bad hex digit: ") + c);
}
}  // namespace

// Hex string covers ceil(width/4) digits, most significant nibble first.
std::string BinaryCode::to_hex() const {
  uint32_t digits = (width + 3) / 4;
  std::string out(digits, '0');
  for (uint32_t d = 0; d < digits; ++d) {
    uint32_t lo = (digits - 1 - d) * 4;
    int v = 0;
    for (uint32_t b = 0; b < 4; ++b) {
      uint32_t bit = lo + b;
      if (bit < width && get(bit)) v |= 1 << b;
    }
    out[d] = "0123456789abcdef"[v];
  }
  return out;
}

BinaryCode BinaryCode::from_hex(const std::string& hex, uint32_t width) {
  uint32_t digits = (width + 3) / 4;
  if (hex.size() != digits)
    throw std::invalid_argument("hex code length does not match declared width");
  BinaryCode c(width);
  for (uint32_t d = 0; d < digits; ++d) {
    int v = hex_digit(hex[d]);
    uint32_t lo = (digits - 1 - d) * 4;
    for (uint32_t b = 0; b < 4; ++b) {
      uint32_t bit = lo + b;
      if (v & (1 << b)) {
        if (bit >= width)
          throw std::invalid_argument("hex code has bits above declared width");
        c.set(bit, true);
      }
    }
  }
  return c;
}

uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b) {
  if (a.width != b.width)
    throw std::invalid_argument("hamming distance of codes with different widths");
  uint32_t d = 0;
  for (size_t i = 0; i < a.words.size(); ++i)
    d += static_cast<uint32_t>(std::popcount(a.words[i] ^ b.words[i]));
  return d;
}

}  // namespace textvec::binarize
