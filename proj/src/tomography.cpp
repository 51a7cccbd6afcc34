#include <algorithm>
#include <cmath>
#include <queue>

#include "fockcat/channels.hpp"
#include "fockcat/tomography.hpp"

namespace fockcat {

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DomainError("percentile: no values");
  if (!(pct >= 0.0 && pct <= 100.0)) throw DomainError("percentile: pct must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapReport parametric_bootstrap(const DensityMatrix& rho_hat, std::size_t n_samples, int n_rep,
                                     const ScssParams& target, std::uint64_t seed,
                                     const BootstrapOptions& options, Exec exec) {
  if (n_rep < 2) throw DomainError("parametric_bootstrap: n_rep must be >= 2");
  if (n_samples < 1) throw DomainError("parametric_bootstrap: n_samples must be >= 1");
  if (rho_hat.modes() != 1) throw DimensionError("parametric_bootstrap: single-mode state required");
  const double t = options.efficiency_correction;
  if (!(t > 0.5 && t <= 1.0)) throw DomainError("parametric_bootstrap: efficiency_correction must lie in (0.5, 1]");

  const FockVector target_state = cat_state(target, options.truncation);
  auto target_fidelity = [&](const DensityMatrix& rho) {
    if (rho.truncation() == options.truncation) return fidelity(rho, target_state);
    return fidelity(rho, cat_state(target, rho.truncation()));
  };

  const DensityMatrix observed = t < 1.0 ? apply_loss(rho_hat, 1.0 - t) : rho_hat;
  const QuadratureSampler sampler(observed, PhaseMode::uniform());

  BootstrapReport report;
  report.n_repetitions = n_rep;
  report.point_estimate = target_fidelity(rho_hat);
  report.replicates.assign(static_cast<std::size_t>(n_rep), 0.0);

#pragma omp parallel for schedule(dynamic) if (use_threads(exec))
  for (int rep = 0; rep < n_rep; ++rep) {
    TomographyJob job;
    job.records = sampler.draw(n_samples, derive_seed(seed, static_cast<std::uint64_t>(rep)));
    job.truncation = options.truncation;
    job.efficiency_correction = t;
    job.max_iterations = options.max_iterations;
    job.convergence_tol = options.convergence_tol;
    job.binning = options.binning;
    const MaxLikResult fit = maxlik_reconstruct(job, Exec::serial);
    report.replicates[static_cast<std::size_t>(rep)] = target_fidelity(fit.state);
  }

  report.lower = std::min(percentile(report.replicates, options.lower_percentile), report.point_estimate);
  report.upper = std::max(percentile(report.replicates, options.upper_percentile), report.point_estimate);
  return report;
}

int count_negative_regions(const WignerGrid& grid, double eps) {
  if (!(eps > 0.0)) throw DomainError("count_negative_regions: eps must be positive");
  const Eigen::Index nx = grid.values.rows();
  const Eigen::Index np = grid.values.cols();
  std::vector<char> seen(static_cast<std::size_t>(nx * np), 0);
  auto negative = [&](Eigen::Index i, Eigen::Index j) { return grid.values(i, j) < -eps; };
  auto flat = [&](Eigen::Index i, Eigen::Index j) { return static_cast<std::size_t>(i * np + j); };

  int regions = 0;
  std::queue<std::pair<Eigen::Index, Eigen::Index>> frontier;
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      if (seen[flat(i, j)] || !negative(i, j)) continue;
      ++regions;
      seen[flat(i, j)] = 1;
      frontier.emplace(i, j);
      while (!frontier.empty()) {
        const auto [a, b] = frontier.front();
        frontier.pop();
        const std::pair<Eigen::Index, Eigen::Index> next[] = {{a - 1, b}, {a + 1, b}, {a, b - 1}, {a, b + 1}};
        for (const auto& [u, v] : next) {
          if (u < 0 || v < 0 || u >= nx || v >= np) continue;
          if (seen[flat(u, v)] || !negative(u, v)) continue;
          seen[flat(u, v)] = 1;
          frontier.emplace(u, v);
        }
      }
    }
  }
  return regions;
}

}  // namespace fockcat
