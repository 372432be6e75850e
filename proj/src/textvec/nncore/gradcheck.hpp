#pragma once

// Central-difference gradient verification. Loss functions under test are
// deterministic closures over double-precision matrices (noise and negative
// draws frozen by the caller), so the only error left is truncation/roundoff.

#include <cmath>
#include <functional>
#include <vector>

#include "textvec/nncore/matrix.hpp"

namespace textvec::nncore {

struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  size_t coords = 0;
};

// `analytic[k][i]` must hold dL/dparam for element i of *params[k] at the
// current parameter values; `loss` re-evaluates the loss at the (perturbed)
// current values.
inline GradCheckReport finite_diff_check(const std::vector<Matrix<double>*>& params,
                                         const std::function<double()>& loss,
                                         const std::vector<std::vector<double>>& analytic,
                                         double h = 1e-5) {
  GradCheckReport rep;
  for (size_t k = 0; k < params.size(); ++k) {
    auto& m = *params[k];
    for (size_t i = 0; i < m.values.size(); ++i) {
      double orig = m.values[i];
      m.values[i] = orig + h;
      double fp = loss();
      m.values[i] = orig - h;
      double fm = loss();
      m.values[i] = orig;
      double fd = (fp - fm) / (2.0 * h);
      double an = analytic[k][i];
      double abs_err = std::abs(an - fd);
      double rel = abs_err / std::max({std::abs(an), std::abs(fd), 1e-6});
      rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
      rep.max_rel_err = std::max(rep.max_rel_err, rel);
      ++rep.coords;
    }
  }
  return rep;
}

}  // namespace textvec::nncore
