#pragma once

// Spearman rank correlation with average ranks for ties.

#include <span>
#include <vector>

namespace textvec::evalwsi {

// Average (fractional) ranks, 1-based: ranks of tied values are averaged.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average-ranked lists. n >= 2; a constant list
// has undefined correlation and raises.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace textvec::evalwsi
