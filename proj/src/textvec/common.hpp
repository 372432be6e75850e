#pragma once

// Shared low-level utilities: deterministic RNG, seed derivation, hashing,
// little-endian binary IO. Everything here must behave identically across
// platforms, so no std::*_distribution is used anywhere.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace textvec {

constexpr const char* kToolkitVersion = "0.1.0";

// splitmix64; used to derive independent stream seeds from (seed, stream id).
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x51ed270b7a53b581ULL));
}

// FNV-1a over raw bytes; used for vocab content hashes and shuffle scatter.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// mt19937_64 core with hand-rolled transforms so draw sequences are portable.
class Rng {
 public:
  explicit Rng(uint64_t seed = 1) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // (0, 1), for log transforms
  double uniform01_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // unbiased integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = engine_();
    while (v >= lim) v = engine_();
    return v % n;
  }

  // Box-Muller, cosine branch only: exactly two uniform draws per call.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform01_open();
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mean + stddev * z;
  }

  // standard Gumbel(0,1): one uniform draw per call
  double gumbel() { return -std::log(-std::log(uniform01_open())); }

 private:
  std::mt19937_64 engine_;
};

// --- little-endian binary IO ------------------------------------------------
// Host is assumed little-endian (asserted at startup in the CLI); these wrap
// fstream with explicit widths so file layouts are unambiguous.

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("unexpected end of file");
  return v;
}

inline void write_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("unexpected end of file");
}

inline std::ifstream open_input(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

}  // namespace textvec
