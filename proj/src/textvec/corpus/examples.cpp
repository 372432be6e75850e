#include "textvec/corpus/examples.hpp"

#include <stdexcept>

namespace textvec::corpus {

EncodedDocument encode_document(uint32_t doc_id, const std::vector<std::string>& tokens,
                                const Vocabulary& vocab) {
  EncodedDocument d;
  d.doc_id = doc_id;
  d.token_ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto id = vocab.id(t);
    if (id && *id < vocab.unigram_count()) d.token_ids.push_back(*id);
  }
  return d;
}

void generate_dbow(const EncodedDocument& doc, const Vocabulary& vocab, bool include_bigrams,
                   const std::function<void(const DbowRecord&)>& sink) {
  for (uint32_t id : doc.token_ids) sink(DbowRecord{doc.doc_id, id});
  if (!include_bigrams) return;
  for (size_t i = 0; i + 1 < doc.token_ids.size(); ++i) {
    const std::string& a = vocab.term(doc.token_ids[i]).surface;
    const std::string& b = vocab.term(doc.token_ids[i + 1]).surface;
    auto id = vocab.id(bigram_surface(a, b));
    if (id) sink(DbowRecord{doc.doc_id, *id});
  }
}

void generate_dm(const EncodedDocument& doc, int window, bool one_sided,
                 const std::function<void(const DmRecord&)>& sink) {
  if (window < 1) throw std::invalid_argument("dm window must be >= 1");
  const auto& ids = doc.token_ids;
  size_t n = ids.size();
  size_t w = static_cast<size_t>(window);
  DmRecord r;
  r.doc = doc.doc_id;
  if (one_sided) {
    if (n < w + 1) return;
    for (size_t c = w; c < n; ++c) {
      r.center = ids[c];
      r.context.assign(ids.begin() + (c - w), ids.begin() + c);
      sink(r);
    }
  } else {
    if (n < 2 * w + 1) return;
    for (size_t c = w; c + w < n; ++c) {
      r.center = ids[c];
      r.context.clear();
      for (size_t i = c - w; i < c; ++i) r.context.push_back(ids[i]);
      for (size_t i = c + 1; i <= c + w; ++i) r.context.push_back(ids[i]);
      sink(r);
    }
  }
}

void generate_sg(const EncodedDocument& doc, int window,
                 const std::function<void(const SgRecord&)>& sink) {
  if (window < 1) throw std::invalid_argument("sg window must be >= 1");
  const auto& ids = doc.token_ids;
  size_t n = ids.size();
  size_t w = static_cast<size_t>(window);
  SgRecord r;
  for (size_t c = 0; c < n; ++c) {
    r.center = ids[c];
    r.context.clear();
    size_t lo = c >= w ? c - w : 0;
    size_t hi = std::min(n, c + w + 1);
    for (size_t i = lo; i < hi; ++i)
      if (i != c) r.context.push_back(ids[i]);
    if (!r.context.empty()) sink(r);
  }
}

void pack_dbow(const DbowRecord& r, std::vector<uint32_t>& out) {
  out.assign({r.doc, r.target});
}

void pack_dm(const DmRecord& r, std::vector<uint32_t>& out) {
  out.clear();
  out.push_back(r.doc);
  out.push_back(r.center);
  out.insert(out.end(), r.context.begin(), r.context.end());
}

void pack_sg(const SgRecord& r, int window, std::vector<uint32_t>& out) {
  size_t slots = 2 * static_cast<size_t>(window);
  if (r.context.size() > slots)
    throw std::invalid_argument("sg record context exceeds window capacity");
  out.clear();
  out.push_back(r.center);
  out.push_back(static_cast<uint32_t>(r.context.size()));
  out.insert(out.end(), r.context.begin(), r.context.end());
  out.resize(2 + slots, kPad);
}

void unpack_dbow(const uint32_t* raw, DbowRecord& r) {
  r.doc = raw[0];
  r.target = raw[1];
}

void unpack_dm(const uint32_t* raw, uint32_t width, DmRecord& r) {
  size_t ctx = (width - 8) / 4;
  r.doc = raw[0];
  r.center = raw[1];
  r.context.assign(raw + 2, raw + 2 + ctx);
}

void unpack_sg(const uint32_t* raw, uint32_t width, SgRecord& r) {
  size_t slots = (width - 8) / 4;
  r.center = raw[0];
  uint32_t count = raw[1];
  if (count > slots) throw std::runtime_error("corrupt sg record: count exceeds capacity");
  r.context.assign(raw + 2, raw + 2 + count);
}

}  // namespace textvec::corpus
