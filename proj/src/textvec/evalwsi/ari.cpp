#include "textvec/evalwsi/ari.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace textvec::evalwsi {

namespace {
double choose2(double n) { return n * (n - 1.0) / 2.0; }
}  // namespace

double adjusted_rand_index(std::span<const uint32_t> pred, std::span<const uint32_t> gold) {
  if (pred.size() != gold.size())
    throw std::invalid_argument("ari: partitions cover different instance counts");
  if (pred.empty()) throw std::invalid_argument("ari: empty partitions");

  // contingency table n_ij plus row/column sums
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> cells;
  std::map<uint32_t, uint64_t> rows, cols;
  for (size_t i = 0; i < pred.size(); ++i) {
    ++cells[{pred[i], gold[i]}];
    ++rows[pred[i]];
    ++cols[gold[i]];
  }

  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [k, n] : cells) sum_cells += choose2(static_cast<double>(n));
  for (const auto& [k, n] : rows) sum_rows += choose2(static_cast<double>(n));
  for (const auto& [k, n] : cols) sum_cols += choose2(static_cast<double>(n));

  double total_pairs = choose2(static_cast<double>(pred.size()));
  double expected = total_pairs > 0.0 ? sum_rows * sum_cols / total_pairs : 0.0;
  double max_index = 0.5 * (sum_rows + sum_cols);
  double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions trivial
  return (sum_cells - expected) / denom;
}

}  // namespace textvec::evalwsi
