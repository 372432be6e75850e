#pragma once

// Relevance labels: TSV of `doc_id TAB comma-separated labels`. Label strings
// are interned to dense ids; per-document sets are sorted for fast overlap.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace textvec::corpus {

struct LabelTable {
  std::vector<std::string> names;  // label id -> surface
  std::unordered_map<uint32_t, std::vector<uint32_t>> doc_labels;  // sorted ids

  // Empty set for documents absent from the file.
  const std::vector<uint32_t>& labels_of(uint32_t doc_id) const;
};

LabelTable load_labels(const std::string& path);

}  // namespace textvec::corpus
