#include "textvec/evalwsi/spearman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace textvec::evalwsi {

std::vector<double> average_ranks(std::span<const double> values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("spearman: need at least two pairs");
  std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
  double ma = 0, mb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double num = 0, va = 0, vb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    double da = ra[i] - ma, db = rb[i] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0)
    throw std::invalid_argument("spearman: correlation undefined for a constant list");
  return num / std::sqrt(va * vb);
}

}  // namespace textvec::evalwsi
