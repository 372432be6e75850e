#include "textvec/corpus/store.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace textvec::corpus {

namespace {
constexpr char kMagic[4] = {'B', 'P', 'V', 'X'};
constexpr uint64_t kMaxFanout = 256;  // bucket files open at once per level
}  // namespace

RecordSpool::RecordSpool(std::string path, uint32_t width)
    : path_(std::move(path)), width_(width) {
  if (width_ == 0 || width_ % 4 != 0)
    throw std::invalid_argument("record width must be a positive multiple of 4");
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open spool for writing: " + path_);
}

RecordSpool::~RecordSpool() = default;

void RecordSpool::append(const void* record) {
  out_.write(static_cast<const char*>(record), width_);
  ++count_;
}

void RecordSpool::append_words(const std::vector<uint32_t>& words) {
  if (words.size() * 4 != width_)
    throw std::invalid_argument("record size does not match spool width");
  append(words.data());
}

void RecordSpool::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("failed writing spool: " + path_);
}

namespace {

// Shuffle [0, count) records of `in_path` into `out`, recursing while the
// slice exceeds the budget. `level`/`slot` derive independent seeds and unique
// scratch names.
void shuffle_slice(const std::string& in_path, uint32_t width, uint64_t count,
                   uint64_t seed, int level, uint64_t slot, std::ofstream& out,
                   const std::string& scratch_dir, uint64_t bucket_budget,
                   ShuffleStats& stats) {
  if (count <= bucket_budget) {
    std::vector<char> buf(count * width);
    if (count > 0) {
      std::ifstream in(in_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot reopen bucket: " + in_path);
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (!in) throw std::runtime_error("short read on bucket: " + in_path);
    }
    Rng rng(derive_seed(seed, (static_cast<uint64_t>(level) << 32) | slot));
    std::vector<char> tmp(width);
    for (uint64_t j = count; j > 1; --j) {
      uint64_t k = rng.uniform_int(j);
      if (k != j - 1) {
        char* a = buf.data() + (j - 1) * width;
        char* b = buf.data() + k * width;
        std::memcpy(tmp.data(), a, width);
        std::memcpy(a, b, width);
        std::memcpy(b, tmp.data(), width);
      }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    stats.leaf_buckets += 1;
    stats.max_resident_records = std::max(stats.max_resident_records, count);
    return;
  }

  uint64_t fanout = std::min((count + bucket_budget - 1) / bucket_budget, kMaxFanout);
  std::vector<std::string> paths(fanout);
  std::vector<std::ofstream> files(fanout);
  std::vector<uint64_t> counts(fanout, 0);
  for (uint64_t b = 0; b < fanout; ++b) {
    paths[b] = scratch_dir + "/bucket_" + std::to_string(level) + "_" +
               std::to_string(slot) + "_" + std::to_string(b) + ".tmp";
    files[b].open(paths[b], std::ios::binary | std::ios::trunc);
    if (!files[b]) throw std::runtime_error("cannot open scratch bucket: " + paths[b]);
  }
  {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot reopen for scatter: " + in_path);
    std::vector<char> rec(width);
    uint64_t level_seed = derive_seed(seed, 0x5ca77e8 + static_cast<uint64_t>(level));
    for (uint64_t i = 0; i < count; ++i) {
      in.read(rec.data(), width);
      if (!in) throw std::runtime_error("short read during scatter: " + in_path);
      uint64_t b = mix64(level_seed ^ mix64(i)) % fanout;
      files[b].write(rec.data(), width);
      ++counts[b];
    }
  }
  for (uint64_t b = 0; b < fanout; ++b) {
    files[b].close();
    if (files[b].fail()) throw std::runtime_error("failed writing scratch bucket: " + paths[b]);
  }
  for (uint64_t b = 0; b < fanout; ++b) {
    shuffle_slice(paths[b], width, counts[b], seed, level + 1, slot * kMaxFanout + b, out,
                  scratch_dir, bucket_budget, stats);
    std::remove(paths[b].c_str());
  }
}

}  // namespace

ShuffleStats global_shuffle(const std::string& spool_path, StoreVariant variant,
                            uint32_t width, uint64_t count, uint64_t seed,
                            const std::string& out_path, const std::string& scratch_dir,
                            uint64_t bucket_budget) {
  if (bucket_budget == 0) throw std::invalid_argument("bucket budget must be positive");
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open store for writing: " + out_path);
  out.write(kMagic, 4);
  write_pod(out, static_cast<uint8_t>(variant));
  write_pod(out, width);
  write_pod(out, count);
  write_pod(out, seed);

  ShuffleStats stats;
  shuffle_slice(spool_path, width, count, seed, 0, 0, out, scratch_dir, bucket_budget, stats);
  out.close();
  if (out.fail()) throw std::runtime_error("failed writing store: " + out_path);
  std::remove(spool_path.c_str());
  return stats;
}

ExampleStore ExampleStore::open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open store: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an example store (bad magic): " + path);
  ExampleStore s;
  s.path_ = path;
  uint8_t v = read_pod<uint8_t>(in);
  if (v > 2) throw std::runtime_error("unknown store variant in " + path);
  s.variant_ = static_cast<StoreVariant>(v);
  s.width_ = read_pod<uint32_t>(in);
  s.count_ = read_pod<uint64_t>(in);
  s.seed_ = read_pod<uint64_t>(in);
  if (s.width_ == 0 || s.width_ % 4 != 0)
    throw std::runtime_error("corrupt store header (width) in " + path);
  return s;
}

ExampleStore::Reader::Reader(const std::string& path, uint32_t width, uint64_t count,
                             uint64_t begin, uint64_t end)
    : width_(width), pos_(begin), end_(end) {
  if (begin > end || end > count) throw std::invalid_argument("reader range out of bounds");
  in_.open(path, std::ios::binary);
  if (!in_) throw std::runtime_error("cannot open store for reading: " + path);
  in_.seekg(static_cast<std::streamoff>(25 + begin * width));  // 25 = header bytes
}

bool ExampleStore::Reader::next(void* outbuf) {
  if (pos_ >= end_) return false;
  in_.read(static_cast<char*>(outbuf), width_);
  if (!in_) throw std::runtime_error("short read in example store");
  ++pos_;
  return true;
}

}  // namespace textvec::corpus
