#pragma once

// Paragraph-vector model family: PV-DBOW and PV-DM, their binary variants
// (coding layer between the embedding and the softmax), and Real-Binary
// PV-DBOW (real embedding -> linear projection -> coding layer), which
// yields both a real and a binary representation from one model.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "textvec/binarize/binarize.hpp"
#include "textvec/common.hpp"
#include "textvec/nncore/matrix.hpp"

namespace textvec::pvmodels {

enum class PvKind : uint8_t { pvdbow = 0, pvdm = 1, realbinary = 2 };

inline const char* pv_kind_name(PvKind k) {
  switch (k) {
    case PvKind::pvdbow: return "pvdbow";
    case PvKind::pvdm: return "pvdm";
    case PvKind::realbinary: return "realbinary";
  }
  return "?";
}

template <typename T>
struct PvModel {
  PvKind kind = PvKind::pvdbow;
  nncore::Matrix<T> doc_embeddings;   // num_docs x d (d_real for realbinary)
  nncore::Matrix<T> word_embeddings;  // pvdm only: unigrams x d_word
  nncore::Matrix<T> projection;       // realbinary only: d_real x d_bin
  nncore::Matrix<T> output_weights;   // classes x softmax input dim
  nncore::Matrix<T> output_bias;      // classes x 1
  binarize::BinarizationStrategy binarizer;  // kind none = real-valued model
  uint32_t window = 0;                // pvdm
  bool one_sided = true;              // pvdm
  uint64_t vocab_hash = 0;

  int64_t num_docs() const { return doc_embeddings.rows; }
  int64_t num_classes() const { return output_weights.rows; }

  // Width of the code/embedding the model emits per document.
  int64_t rep_width() const {
    return kind == PvKind::realbinary ? projection.cols : doc_embeddings.cols;
  }

  // Softmax input dimensionality.
  int64_t input_width() const {
    switch (kind) {
      case PvKind::pvdbow: return doc_embeddings.cols;
      case PvKind::realbinary: return projection.cols;
      case PvKind::pvdm: {
        int64_t ctx = one_sided ? window : 2 * static_cast<int64_t>(window);
        return doc_embeddings.cols + ctx * word_embeddings.cols;
      }
    }
    return 0;
  }

  int64_t context_len() const { return one_sided ? window : 2 * static_cast<int64_t>(window); }
};

// Embeddings random, softmax weights and biases zero.
template <typename T>
PvModel<T> make_pvdbow(int64_t num_docs, int64_t d, int64_t classes,
                       const binarize::BinarizationStrategy& binarizer, uint64_t seed) {
  PvModel<T> m;
  m.kind = PvKind::pvdbow;
  m.doc_embeddings = nncore::Matrix<T>(num_docs, d);
  m.output_weights = nncore::Matrix<T>(classes, d);
  m.output_bias = nncore::Matrix<T>(classes, 1);
  m.binarizer = binarizer;
  Rng r(derive_seed(seed, 0));
  nncore::uniform_init(m.doc_embeddings, r);
  return m;
}

template <typename T>
PvModel<T> make_pvdm(int64_t num_docs, int64_t d_doc, int64_t d_word, int64_t unigrams,
                     uint32_t window, bool one_sided,
                     const binarize::BinarizationStrategy& binarizer, uint64_t seed) {
  if (window < 1) throw std::invalid_argument("pvdm window must be >= 1");
  PvModel<T> m;
  m.kind = PvKind::pvdm;
  m.window = window;
  m.one_sided = one_sided;
  m.doc_embeddings = nncore::Matrix<T>(num_docs, d_doc);
  m.word_embeddings = nncore::Matrix<T>(unigrams, d_word);
  int64_t ctx = one_sided ? window : 2 * static_cast<int64_t>(window);
  m.output_weights = nncore::Matrix<T>(unigrams, d_doc + ctx * d_word);
  m.output_bias = nncore::Matrix<T>(unigrams, 1);
  m.binarizer = binarizer;
  Rng rd(derive_seed(seed, 0));
  nncore::uniform_init(m.doc_embeddings, rd);
  Rng rw(derive_seed(seed, 1));
  nncore::uniform_init(m.word_embeddings, rw);
  return m;
}

template <typename T>
PvModel<T> make_realbinary(int64_t num_docs, int64_t d_real, int64_t d_bin, int64_t classes,
                           const binarize::BinarizationStrategy& binarizer, uint64_t seed) {
  if (!binarizer.active())
    throw std::invalid_argument("the real-binary model requires a binarization strategy");
  PvModel<T> m;
  m.kind = PvKind::realbinary;
  m.doc_embeddings = nncore::Matrix<T>(num_docs, d_real);
  m.projection = nncore::Matrix<T>(d_real, d_bin);
  m.output_weights = nncore::Matrix<T>(classes, d_bin);
  m.output_bias = nncore::Matrix<T>(classes, 1);
  m.binarizer = binarizer;
  Rng rd(derive_seed(seed, 0));
  nncore::uniform_init(m.doc_embeddings, rd);
  Rng rp(derive_seed(seed, 3));
  nncore::uniform_init(m.projection, rp);
  return m;
}

// ---------------------------------------------------------------------------
// Serialization: values only (no optimizer state), little-endian.

inline constexpr char kPvModelMagic[4] = {'B', 'P', 'V', 'M'};
inline constexpr uint16_t kPvModelVersion = 1;

template <typename T>
void save_pv_model(const PvModel<T>& m, const std::string& path) {
  auto out = open_output(path);
  out.write(kPvModelMagic, 4);
  write_pod(out, kPvModelVersion);
  write_pod(out, static_cast<uint8_t>(sizeof(T)));
  write_pod(out, static_cast<uint8_t>(m.kind));
  write_pod(out, static_cast<uint32_t>(m.doc_embeddings.cols));
  write_pod(out, static_cast<uint32_t>(m.kind == PvKind::pvdm ? m.word_embeddings.cols : 0));
  write_pod(out, static_cast<uint32_t>(m.kind == PvKind::realbinary ? m.projection.cols : 0));
  write_pod(out, m.window);
  write_pod(out, static_cast<uint8_t>(m.one_sided ? 1 : 0));
  write_pod(out, static_cast<uint8_t>(m.binarizer.kind));
  write_pod(out, m.binarizer.noise_std);
  write_pod(out, static_cast<uint8_t>(m.binarizer.anneal ? 1 : 0));
  write_pod(out, m.binarizer.anneal_increment);
  write_pod(out, m.binarizer.slope);
  write_pod(out, static_cast<uint64_t>(m.doc_embeddings.rows));
  write_pod(out, static_cast<uint64_t>(m.output_weights.rows));
  write_pod(out, m.vocab_hash);
  auto dump = [&](const nncore::Matrix<T>& mat) {
    write_bytes(out, mat.values.data(), mat.values.size() * sizeof(T));
  };
  dump(m.doc_embeddings);
  if (m.kind == PvKind::pvdm) dump(m.word_embeddings);
  if (m.kind == PvKind::realbinary) dump(m.projection);
  dump(m.output_weights);
  dump(m.output_bias);
  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

template <typename T>
PvModel<T> load_pv_model(const std::string& path) {
  auto in = open_input(path);
  char magic[4];
  read_bytes(in, magic, 4);
  if (std::memcmp(magic, kPvModelMagic, 4) != 0)
    throw std::runtime_error("not a paragraph-vector model file (bad magic): " + path);
  auto version = read_pod<uint16_t>(in);
  if (version != kPvModelVersion)
    throw std::runtime_error("unsupported model version " + std::to_string(version));
  auto precision = read_pod<uint8_t>(in);
  if (precision != sizeof(T))
    throw std::runtime_error("model stores " + std::to_string(int(precision)) +
                             "-byte values; refusing to load as " +
                             std::to_string(sizeof(T)) + "-byte");
  auto kind_raw = read_pod<uint8_t>(in);
  if (kind_raw > 2)
    throw std::runtime_error("unknown model kind " + std::to_string(int(kind_raw)));

  PvModel<T> m;
  m.kind = static_cast<PvKind>(kind_raw);
  auto d_doc = read_pod<uint32_t>(in);
  auto d_word = read_pod<uint32_t>(in);
  auto d_bin = read_pod<uint32_t>(in);
  m.window = read_pod<uint32_t>(in);
  m.one_sided = read_pod<uint8_t>(in) != 0;
  auto bkind = read_pod<uint8_t>(in);
  if (bkind > 4) throw std::runtime_error("unknown binarizer kind " + std::to_string(int(bkind)));
  m.binarizer.kind = static_cast<binarize::BinarizerKind>(bkind);
  m.binarizer.noise_std = read_pod<double>(in);
  m.binarizer.anneal = read_pod<uint8_t>(in) != 0;
  m.binarizer.anneal_increment = read_pod<double>(in);
  m.binarizer.slope = read_pod<double>(in);
  auto num_docs = read_pod<uint64_t>(in);
  auto classes = read_pod<uint64_t>(in);
  m.vocab_hash = read_pod<uint64_t>(in);

  m.doc_embeddings = nncore::Matrix<T>(static_cast<int64_t>(num_docs), d_doc);
  if (m.kind == PvKind::pvdm) {
    int64_t ctx = m.one_sided ? m.window : 2 * static_cast<int64_t>(m.window);
    m.word_embeddings = nncore::Matrix<T>(static_cast<int64_t>(classes), d_word);
    m.output_weights =
        nncore::Matrix<T>(static_cast<int64_t>(classes), d_doc + ctx * static_cast<int64_t>(d_word));
  } else if (m.kind == PvKind::realbinary) {
    m.projection = nncore::Matrix<T>(d_doc, d_bin);
    m.output_weights = nncore::Matrix<T>(static_cast<int64_t>(classes), d_bin);
  } else {
    m.output_weights = nncore::Matrix<T>(static_cast<int64_t>(classes), d_doc);
  }
  m.output_bias = nncore::Matrix<T>(static_cast<int64_t>(classes), 1);

  auto slurp = [&](nncore::Matrix<T>& mat) {
    read_bytes(in, mat.values.data(), mat.values.size() * sizeof(T));
  };
  slurp(m.doc_embeddings);
  if (m.kind == PvKind::pvdm) slurp(m.word_embeddings);
  if (m.kind == PvKind::realbinary) slurp(m.projection);
  slurp(m.output_weights);
  slurp(m.output_bias);
  return m;
}

}  // namespace textvec::pvmodels
