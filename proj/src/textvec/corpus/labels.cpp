#include "textvec/corpus/labels.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "textvec/common.hpp"

namespace textvec::corpus {

const std::vector<uint32_t>& LabelTable::labels_of(uint32_t doc_id) const {
  static const std::vector<uint32_t> kEmpty;
  auto it = doc_labels.find(doc_id);
  return it == doc_labels.end() ? kEmpty : it->second;
}

LabelTable load_labels(const std::string& path) {
  std::ifstream f = open_input(path);
  LabelTable table;
  std::unordered_map<std::string, uint32_t> intern;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error(path + ": malformed label line " + std::to_string(line_no) +
                               " (no tab)");
    uint32_t doc;
    try {
      size_t used = 0;
      unsigned long v = std::stoul(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing garbage");
      doc = static_cast<uint32_t>(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": malformed label line " + std::to_string(line_no) +
                               " (doc id is not an integer)");
    }
    std::vector<uint32_t>& ids = table.doc_labels[doc];
    size_t start = tab + 1;
    while (start <= line.size()) {
      size_t comma = line.find(',', start);
      size_t end = comma == std::string::npos ? line.size() : comma;
      std::string label = line.substr(start, end - start);
      if (!label.empty()) {
        auto [it, fresh] = intern.emplace(label, static_cast<uint32_t>(table.names.size()));
        if (fresh) table.names.push_back(label);
        ids.push_back(it->second);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return table;
}

}  // namespace textvec::corpus
