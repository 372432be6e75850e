#pragma once

// On-disk training-example store. Records are fixed-width; a spool file is
// written in generation order, then globally shuffled with bounded memory
// into the final store:
//
//   header: magic "BPVX", u8 variant, u32 record width, u64 count, u64 seed
//   body:   count records of `width` bytes, little-endian
//
// The shuffle scatters records into hash-addressed buckets (recursing while a
// bucket exceeds the in-memory budget) and Fisher-Yates-shuffles each bucket
// in memory; the permutation depends only on (record position, seed).

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "textvec/common.hpp"

namespace textvec::corpus {

enum class StoreVariant : uint8_t { dbow = 0, dm = 1, sg = 2 };

class RecordSpool {
 public:
  RecordSpool(std::string path, uint32_t width);
  ~RecordSpool();

  void append(const void* record);
  void append_words(const std::vector<uint32_t>& words);  // must match width
  void close();

  const std::string& path() const { return path_; }
  uint32_t width() const { return width_; }
  uint64_t count() const { return count_; }

 private:
  std::string path_;
  uint32_t width_;
  uint64_t count_ = 0;
  std::ofstream out_;
};

struct ShuffleStats {
  uint64_t leaf_buckets = 0;
  uint64_t max_resident_records = 0;  // peak records held in memory at once
};

// Consumes the spool file (deleted on success). bucket_budget is the maximum
// record count shuffled in memory at once.
ShuffleStats global_shuffle(const std::string& spool_path, StoreVariant variant,
                            uint32_t width, uint64_t count, uint64_t seed,
                            const std::string& out_path, const std::string& scratch_dir,
                            uint64_t bucket_budget = 1 << 16);

class ExampleStore {
 public:
  static ExampleStore open(const std::string& path);

  StoreVariant variant() const { return variant_; }
  uint32_t width() const { return width_; }
  uint64_t count() const { return count_; }
  uint64_t seed() const { return seed_; }
  const std::string& path() const { return path_; }

  // Independent sequential cursor; safe to have one per worker thread.
  class Reader {
   public:
    Reader(const std::string& path, uint32_t width, uint64_t count, uint64_t begin,
           uint64_t end);
    // Fills `out` (width bytes); false at the end of the assigned range.
    bool next(void* out);
    uint64_t remaining() const { return end_ - pos_; }

   private:
    std::ifstream in_;
    uint32_t width_;
    uint64_t pos_, end_;
  };

  Reader reader() const { return Reader(path_, width_, count_, 0, count_); }
  Reader range_reader(uint64_t begin, uint64_t end) const {
    return Reader(path_, width_, count_, begin, end);
  }

 private:
  std::string path_;
  StoreVariant variant_ = StoreVariant::dbow;
  uint32_t width_ = 0;
  uint64_t count_ = 0;
  uint64_t seed_ = 0;
};

}  // namespace textvec::corpus
