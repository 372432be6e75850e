#pragma once

// Encoded documents and training-example generation for the three example
// layouts: DBOW (doc -> target n-gram), DM (doc + context -> center word) and
// SG (center word -> context words).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textvec/corpus/vocabulary.hpp"

namespace textvec::corpus {

struct EncodedDocument {
  uint32_t doc_id = 0;
  std::vector<uint32_t> token_ids;  // unigram ids, source order, OOV dropped
};

EncodedDocument encode_document(uint32_t doc_id, const std::vector<std::string>& tokens,
                                const Vocabulary& vocab);

struct DbowRecord {
  uint32_t doc = 0;
  uint32_t target = 0;  // unigram or bigram id
};

struct DmRecord {
  uint32_t doc = 0;
  uint32_t center = 0;
  std::vector<uint32_t> context;  // exactly window (one-sided) or 2*window ids
};

struct SgRecord {
  uint32_t center = 0;
  std::vector<uint32_t> context;  // 1..2*window ids, edge-truncated
};

// One record per retained unigram occurrence, plus one per adjacent pair (in
// the encoded stream) whose joined surface is a vocabulary bigram.
void generate_dbow(const EncodedDocument& doc, const Vocabulary& vocab, bool include_bigrams,
                   const std::function<void(const DbowRecord&)>& sink);

// One record per center position whose window is completely inside the
// document; one-sided windows cover the `window` tokens before the center.
void generate_dm(const EncodedDocument& doc, int window, bool one_sided,
                 const std::function<void(const DmRecord&)>& sink);

// Symmetric window truncated at document edges; centers with empty contexts
// (single-token documents) yield nothing.
void generate_sg(const EncodedDocument& doc, int window,
                 const std::function<void(const SgRecord&)>& sink);

// --- fixed-width serialization for the shuffled store ------------------------
// DBOW: doc u32, target u32
// DM:   doc u32, center u32, context u32[ctx_len]
// SG:   center u32, count u32, context u32[2*window] padded with kPad
inline constexpr uint32_t kPad = 0xffffffffu;

inline uint32_t dbow_record_width() { return 8; }
inline uint32_t dm_record_width(int window, bool one_sided) {
  return 8 + 4u * static_cast<uint32_t>(one_sided ? window : 2 * window);
}
inline uint32_t sg_record_width(int window) {
  return 8 + 4u * static_cast<uint32_t>(2 * window);
}

void pack_dbow(const DbowRecord& r, std::vector<uint32_t>& out);
void pack_dm(const DmRecord& r, std::vector<uint32_t>& out);
void pack_sg(const SgRecord& r, int window, std::vector<uint32_t>& out);

void unpack_dbow(const uint32_t* raw, DbowRecord& r);
void unpack_dm(const uint32_t* raw, uint32_t width, DmRecord& r);
void unpack_sg(const uint32_t* raw, uint32_t width, SgRecord& r);

}  // namespace textvec::corpus
