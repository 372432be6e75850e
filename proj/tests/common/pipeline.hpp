#pragma once

// In-memory corpus -> shuffled example store plumbing shared by tests.

#include <filesystem>
#include <string>
#include <vector>

#include "textvec/corpus/examples.hpp"
#include "textvec/corpus/store.hpp"
#include "textvec/corpus/vocabulary.hpp"

namespace testutil {

using Docs = std::vector<std::vector<std::string>>;

inline textvec::corpus::Vocabulary build_vocab(const Docs& docs, bool bigrams = false,
                                               uint64_t min_count = 1) {
  textvec::corpus::VocabCounter counter(bigrams);
  for (const auto& d : docs) counter.add_document(d);
  return counter.build(min_count);
}

// Encodes every document (doc id = position), generates examples for the
// requested variant, and writes the shuffled store. Returns the store path.
inline std::string make_store(const Docs& docs, const textvec::corpus::Vocabulary& vocab,
                              textvec::corpus::StoreVariant variant, int window,
                              bool one_sided, bool bigrams, uint64_t seed,
                              const std::string& dir, const std::string& name = "examples") {
  namespace fs = std::filesystem;
  using namespace textvec::corpus;
  uint32_t width = variant == StoreVariant::dbow ? dbow_record_width()
                   : variant == StoreVariant::dm ? dm_record_width(window, one_sided)
                                                 : sg_record_width(window);
  std::string spool_path = dir + "/" + name + ".spool";
  std::string out_path = dir + "/" + name + ".store";
  RecordSpool spool(spool_path, width);
  std::vector<uint32_t> packed;
  for (uint32_t d = 0; d < docs.size(); ++d) {
    auto enc = encode_document(d, docs[d], vocab);
    if (variant == StoreVariant::dbow) {
      generate_dbow(enc, vocab, bigrams, [&](const DbowRecord& r) {
        pack_dbow(r, packed);
        spool.append_words(packed);
      });
    } else if (variant == StoreVariant::dm) {
      generate_dm(enc, window, one_sided, [&](const DmRecord& r) {
        pack_dm(r, packed);
        spool.append_words(packed);
      });
    } else {
      generate_sg(enc, window, [&](const SgRecord& r) {
        pack_sg(r, window, packed);
        spool.append_words(packed);
      });
    }
  }
  spool.close();
  std::string scratch = dir + "/" + name + ".scratch";
  fs::create_directories(scratch);
  global_shuffle(spool_path, variant, width, spool.count(), seed, out_path, scratch);
  std::error_code ec;
  fs::remove_all(scratch, ec);
  return out_path;
}

}  // namespace testutil
