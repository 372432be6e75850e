#include "textvec/binarize/binarize.hpp"

#include <stdexcept>
#include <string>

namespace textvec::binarize {

const char* binarizer_name(BinarizerKind k) {
  switch (k) {
    case BinarizerKind::none: return "none";
    case BinarizerKind::krizhevsky: return "krizhevsky";
    case BinarizerKind::gaussian: return "gaussian";
    case BinarizerKind::bsn_identity: return "bsn-id";
    case BinarizerKind::bsn_sigmoid: return "bsn-sig";
  }
  return "?";
}

BinarizerKind binarizer_from_name(const std::string& name) {
  if (name == "none") return BinarizerKind::none;
  if (name == "krizhevsky") return BinarizerKind::krizhevsky;
  if (name == "gaussian") return BinarizerKind::gaussian;
  if (name == "bsn-id") return BinarizerKind::bsn_identity;
  if (name == "bsn-sig") return BinarizerKind::bsn_sigmoid;
  throw std::invalid_argument("unknown binarizer: " + name +
                              " (expected krizhevsky|gaussian|bsn-id|bsn-sig|none)");
}

}  // namespace textvec::binarize
