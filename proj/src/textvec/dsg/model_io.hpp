#pragma once

// Sense-model serialization. Values only — optimizer accumulators are
// training state and are not persisted. The precision byte records
// sizeof(T); files are refused when it does not match the requested type.

#include <cstring>
#include <fstream>
#include <string>

#include "textvec/common.hpp"
#include "textvec/dsg/model.hpp"

namespace textvec::dsg {

inline constexpr char kSenseModelMagic[4] = {'D', 'S', 'G', 'M'};
inline constexpr uint32_t kSenseModelVersion = 1;

template <typename T>
void save_sense_model(const SenseModel<T>& m, const std::string& path) {
  auto out = open_output(path);
  out.write(kSenseModelMagic, 4);
  write_pod(out, kSenseModelVersion);
  write_pod(out, static_cast<uint8_t>(sizeof(T)));
  write_pod(out, m.k);
  write_pod(out, static_cast<uint64_t>(m.d));
  write_pod(out, static_cast<uint64_t>(m.vocab()));
  write_pod(out, m.vocab_hash);
  write_pod(out, static_cast<uint8_t>(m.disambig_shared ? 1 : 0));
  auto dump = [&](const nncore::Matrix<T>& mat) {
    write_bytes(out, mat.values.data(), mat.values.size() * sizeof(T));
  };
  dump(m.senses);
  dump(m.outputs);
  dump(m.disambig);
  dump(m.marginals);
  write_bytes(out, m.marginal_known.data(), m.marginal_known.size());
  write_bytes(out, m.active.data(), m.active.size());
  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

template <typename T>
SenseModel<T> load_sense_model(const std::string& path) {
  auto in = open_input(path);
  char magic[4];
  read_bytes(in, magic, 4);
  if (std::memcmp(magic, kSenseModelMagic, 4) != 0)
    throw std::runtime_error("not a sense model file: " + path);
  auto version = read_pod<uint32_t>(in);
  if (version != kSenseModelVersion)
    throw std::runtime_error("unsupported sense model version " + std::to_string(version));
  auto precision = read_pod<uint8_t>(in);
  if (precision != sizeof(T))
    throw std::runtime_error("model stores " + std::to_string(int(precision)) +
                             "-byte values; refusing to load as " +
                             std::to_string(sizeof(T)) + "-byte");
  auto k = read_pod<uint32_t>(in);
  auto d = read_pod<uint64_t>(in);
  auto vocab = read_pod<uint64_t>(in);
  auto vocab_hash = read_pod<uint64_t>(in);
  auto shared = read_pod<uint8_t>(in);

  SenseModel<T> m(vocab, k, static_cast<int64_t>(d), /*seed=*/0);
  m.vocab_hash = vocab_hash;
  m.disambig_shared = shared != 0;
  if (!m.disambig_shared)
    m.disambig = nncore::Matrix<T>(static_cast<int64_t>(vocab) * k, static_cast<int64_t>(d));
  auto slurp = [&](nncore::Matrix<T>& mat) {
    read_bytes(in, mat.values.data(), mat.values.size() * sizeof(T));
  };
  slurp(m.senses);
  slurp(m.outputs);
  slurp(m.disambig);
  slurp(m.marginals);
  read_bytes(in, m.marginal_known.data(), m.marginal_known.size());
  read_bytes(in, m.active.data(), m.active.size());
  return m;
}

}  // namespace textvec::dsg
