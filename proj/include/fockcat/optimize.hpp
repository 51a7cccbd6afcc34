#pragma once

#include <functional>
#include <vector>

namespace fockcat::optimize {

struct NelderMeadOptions {
  double initial_step = 0.05;
  /// Stop once every vertex lies within xtol of the best one (max-norm)...
  double xtol = 1e-4;
  /// ...and the objective spread across the simplex is below ftol.
  double ftol = 1e-12;
  int max_evaluations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes f starting from an axis-aligned simplex around x0. Standard
/// reflection / expansion / contraction / shrink coefficients (1, 2, 1/2, 1/2).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace fockcat::optimize
