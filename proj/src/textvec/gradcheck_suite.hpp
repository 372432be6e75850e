#pragma once

// Finite-difference verification of every training loss at double precision.
// Each instance draws a small random model and record, freezes all noise
// sources (negative sample, Gumbel noise; dropout off, smooth coding layer),
// extracts analytic gradients from one backward pass, and compares against
// central differences.

#include <cstdint>
#include <string>
#include <vector>

namespace textvec::gradcheck {

struct CheckResult {
  std::string name;
  double max_rel_err = 0.0;
  int instances = 0;
};

double check_pvdbow(uint64_t seed, bool binarized);
double check_pvdm(uint64_t seed);
double check_realbinary(uint64_t seed);
double check_dsg(uint64_t seed, bool finetune);

// Runs every check `instances` times on derived seeds; returns per-model
// maxima in a fixed order.
std::vector<CheckResult> run_suite(uint64_t seed, int instances = 20);

}  // namespace textvec::gradcheck
