#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "fockcat/channels.hpp"
#include "fockcat/kernels.hpp"
#include "fockcat/tomography.hpp"

namespace fockcat {

namespace {

constexpr double kMinDilution = 1e-10;
constexpr double kMaxDilution = 1e4;

kernels::BinnedCells bin_records(const TomographyJob& job) {
  const auto& b = job.binning;
  const int nx = static_cast<int>(std::lround((b.x_max - b.x_min) / b.x_width));
  std::vector<double> x_centres(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) x_centres[static_cast<std::size_t>(i)] = b.x_min + (i + 0.5) * b.x_width;
  std::vector<double> theta_centres(static_cast<std::size_t>(b.phase_bins));
  for (int t = 0; t < b.phase_bins; ++t) {
    theta_centres[static_cast<std::size_t>(t)] = std::numbers::pi * (t + 0.5) / b.phase_bins;
  }
  RMatrix counts = RMatrix::Zero(b.phase_bins, nx);
  for (const auto& raw : job.records) {
    const QuadratureRecord r = fold_phase(raw);
    // Outliers beyond the window are kept in the edge bins.
    const int i = std::clamp(static_cast<int>(std::floor((r.x - b.x_min) / b.x_width)), 0, nx - 1);
    const int t = std::clamp(static_cast<int>(r.theta / std::numbers::pi * b.phase_bins), 0, b.phase_bins - 1);
    counts(t, i) += 1.0;
  }
  return kernels::BinnedCells::build(x_centres, theta_centres, std::move(counts), job.truncation);
}

CMatrix hermitian_unit_trace(CMatrix m) {
  m = 0.5 * (m + m.adjoint()).eval();
  return m / m.trace().real();
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void TomographyJob::validate() const {
  if (records.empty()) throw DomainError("tomography: at least one record is required");
  if (!(efficiency_correction > 0.5 && efficiency_correction <= 1.0)) {
    throw DomainError("tomography: efficiency_correction must lie in (0.5, 1]");
  }
  if (truncation < 1) throw TruncationError("tomography: truncation must be >= 1");
  if (max_iterations < 1) throw DomainError("tomography: max_iterations must be >= 1");
  if (!(binning.x_width > 0.0) || !(binning.x_max > binning.x_min) || binning.phase_bins < 1) {
    throw DomainError("tomography: invalid binning");
  }
  for (const auto& r : records) {
    if (!std::isfinite(r.x) || !std::isfinite(r.theta)) throw DomainError("tomography: non-finite record");
  }
}

MaxLikResult maxlik_reconstruct(const TomographyJob& job, Exec exec) {
  job.validate();
  const int d = job.truncation + 1;
  const kernels::BinnedCells cells = bin_records(job);
  const double total = static_cast<double>(job.records.size());
  const bool lossy = job.efficiency_correction < 1.0;
  const LossChannel channel(lossy ? 1.0 - job.efficiency_correction : 0.0, job.truncation);

  auto detected = [&](const CMatrix& rho) { return lossy ? channel.apply(rho) : rho; };

  CMatrix rho = CMatrix::Identity(d, d) / static_cast<double>(d);
  kernels::LikelihoodAccumulation acc = kernels::accumulate_likelihood(detected(rho), cells, exec);

  MaxLikResult out{DensityMatrix(rho, 1, job.truncation), 0, false, {acc.log_likelihood}};
  double eps = 1.0;
  const CMatrix id = CMatrix::Identity(d, d);
  for (int it = 0; it < job.max_iterations; ++it) {
    CMatrix r = (lossy ? channel.adjoint(acc.weighted_sum) : acc.weighted_sum) / total;
    r = 0.5 * (r + r.adjoint()).eval();

    bool accepted = false;
    CMatrix candidate;
    kernels::LikelihoodAccumulation next;
    while (eps >= kMinDilution) {
      const CMatrix step = id + eps * r;
      candidate = hermitian_unit_trace(step * rho * step);
      next = kernels::accumulate_likelihood(detected(candidate), cells, exec);
      if (next.log_likelihood >= acc.log_likelihood) {
        accepted = true;
        break;
      }
      eps *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      // No dilution improves the likelihood: rho is a fixed point to numerical precision.
      out.converged = true;
      break;
    }
    const double gain = next.log_likelihood - acc.log_likelihood;
    rho = std::move(candidate);
    acc = std::move(next);
    out.log_likelihood.push_back(acc.log_likelihood);
    eps = std::min(2.0 * eps, kMaxDilution);
    if (gain < job.convergence_tol * total) {
      out.converged = true;
      break;
    }
  }
  out.state = DensityMatrix(rho, 1, job.truncation);
  return out;
}

DensityMatrix loss_correct(const DensityMatrix& rho, double transmission) {
  if (rho.modes() != 1) throw DimensionError("loss_correct: single-mode state required");
  if (!(transmission > 0.5 && transmission <= 1.0)) {
    throw DomainError("loss_correct: transmission must lie in (0.5, 1]");
  }
  if (transmission == 1.0) return rho;
  const int d = rho.mode_dim();
  const double t = transmission;
  const double base = 1.0 - 1.0 / t;  // negative: the inverse of a loss map is not a channel
  CMatrix out = CMatrix::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      Complex acc = 0.0;
      for (int k = 0; m + k < d && n + k < d; ++k) {
        const double mag = std::exp(0.5 * (log_binomial(m + k, k) + log_binomial(n + k, k)) -
                                    0.5 * (m + n) * std::log(t) + k * std::log(std::abs(base)));
        const double sign = (k % 2 == 1 && base < 0.0) ? -1.0 : 1.0;
        acc += sign * mag * rho(m + k, n + k);
      }
      out(m, n) = acc;
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(out);
  const RVector clipped = es.eigenvalues().cwiseMax(0.0);
  CMatrix psd = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(std::move(psd), 1, rho.truncation()).normalized();
}

double correction_transmission(double detector_efficiency, int storage_roundtrips, double loss_per_roundtrip) {
  if (storage_roundtrips < 0) throw DomainError("correction_transmission: negative round-trip count");
  return detector_efficiency * std::pow(1.0 - loss_per_roundtrip, storage_roundtrips);
}

}  // namespace fockcat
