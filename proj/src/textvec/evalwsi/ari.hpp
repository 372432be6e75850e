#pragma once

// Adjusted Rand index between two flat partitions of the same instances.

#include <cstdint>
#include <span>

namespace textvec::evalwsi {

// pred[i] / gold[i] are arbitrary cluster labels of instance i. Equal-length,
// nonempty. Degenerate normalization (max index == expected index, e.g. both
// partitions put everything in one cluster) returns 1.
double adjusted_rand_index(std::span<const uint32_t> pred, std::span<const uint32_t> gold);

}  // namespace textvec::evalwsi
