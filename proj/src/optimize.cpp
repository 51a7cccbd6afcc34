#include "fockcat/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fockcat::optimize {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  std::vector<double> fx(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = simplex[order[i]];
      f2[i] = fx[order[i]];
    }
    simplex.swap(s2);
    fx.swap(f2);
  };
  auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = from[i] + t * (to[i] - from[i]);
    return p;
  };

  bool converged = false;
  while (evals < options.max_evaluations) {
    sort_simplex();
    double spread = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(simplex[v][i] - simplex[0][i]));
    }
    if (spread <= options.xtol && std::abs(fx[n] - fx[0]) <= options.ftol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);
    }

    const auto reflected = along(centroid, simplex[n], -1.0);
    const double fr = eval(reflected);
    if (fr < fx[0]) {
      const auto expanded = along(centroid, simplex[n], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        fx[n] = fe;
      } else {
        simplex[n] = reflected;
        fx[n] = fr;
      }
      continue;
    }
    if (fr < fx[n - 1]) {
      simplex[n] = reflected;
      fx[n] = fr;
      continue;
    }
    // Contraction towards the better of the worst and reflected points.
    const bool outside = fr < fx[n];
    const auto contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, simplex[n], 0.5);
    const double fc = eval(contracted);
    if (fc < std::min(fr, fx[n])) {
      simplex[n] = contracted;
      fx[n] = fc;
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      simplex[v] = along(simplex[0], simplex[v], 0.5);
      fx[v] = eval(simplex[v]);
    }
  }
  sort_simplex();
  return NelderMeadResult{simplex[0], fx[0], evals, converged};
}

}  // namespace fockcat::optimize
