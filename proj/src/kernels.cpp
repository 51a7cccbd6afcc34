#include "fockcat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fockcat/fock.hpp"

namespace fockcat::kernels {

namespace {

constexpr Eigen::Index kChunk = 256;

// sqrt(m! / (m+k)!) for all m + k <= N, indexed [k][m].
std::vector<std::vector<double>> factorial_ratios(int truncation) {
  std::vector<std::vector<double>> out(truncation + 1);
  for (int k = 0; k <= truncation; ++k) {
    out[k].resize(truncation + 1 - k);
    for (int m = 0; m + k <= truncation; ++m) {
      double r = 1.0;
      for (int j = m + 1; j <= m + k; ++j) r /= std::sqrt(static_cast<double>(j));
      out[k][m] = r;
    }
  }
  return out;
}

// Complex W at one point. rho(m, m+k) multiplies the Wigner function of
// |m+k><m|, which is (-1)^m / pi * sqrt(m!/(m+k)!) * (sqrt2 (x + i p))^k
// * e^{-r^2} * L_m^{(k)}(2 r^2); rho(m+k, m) takes the conjugate.
Complex wigner_point(const CMatrix& rho, const std::vector<std::vector<double>>& ratios, double x,
                     double p) {
  const int d = static_cast<int>(rho.rows());
  const double r2 = x * x + p * p;
  const double y = 2.0 * r2;
  const double gauss = std::exp(-r2) / std::numbers::pi;
  const Complex base = std::sqrt(2.0) * Complex(x, p);
  Complex total = 0.0;
  Complex power = 1.0;
  for (int k = 0; k < d; ++k) {
    double l_prev = 0.0;
    double l_cur = 1.0;
    for (int m = 0; m + k < d; ++m) {
      if (m == 1) {
        l_prev = 1.0;
        l_cur = 1.0 + k - y;
      } else if (m > 1) {
        const double next = ((2.0 * (m - 1) + 1.0 + k - y) * l_cur - (m - 1 + k) * l_prev) / m;
        l_prev = l_cur;
        l_cur = next;
      }
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const Complex w = sign * gauss * ratios[k][m] * power * l_cur;
      if (k == 0) {
        total += rho(m, m) * w;
      } else {
        total += rho(m, m + k) * w + rho(m + k, m) * std::conj(w);
      }
    }
    power *= base;
  }
  return total;
}

}  // namespace

WignerValues wigner_grid(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                         Exec exec) {
  const auto ratios = factorial_ratios(static_cast<int>(rho.rows()) - 1);
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto np = static_cast<Eigen::Index>(ps.size());
  WignerValues out;
  out.real.resize(nx, np);
  RVector imag_max = RVector::Zero(nx);
#pragma omp parallel for schedule(static) if (use_threads(exec))
  for (Eigen::Index i = 0; i < nx; ++i) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < np; ++j) {
      const Complex w = wigner_point(rho, ratios, xs[i], ps[j]);
      out.real(i, j) = w.real();
      worst = std::max(worst, std::abs(w.imag()));
    }
    imag_max(i) = worst;
  }
  out.max_imag = nx > 0 ? imag_max.maxCoeff() : 0.0;
  return out;
}

CMatrix quadrature_harmonics(const CMatrix& rho, std::span<const double> xs, Exec exec) {
  const int d = static_cast<int>(rho.rows());
  const auto nx = static_cast<Eigen::Index>(xs.size());
  CMatrix out(nx, d);
#pragma omp parallel for schedule(static) if (use_threads(exec))
  for (Eigen::Index i = 0; i < nx; ++i) {
    const RVector psi = fock_wavefunctions(d - 1, xs[i]);
    for (int k = 0; k < d; ++k) {
      Complex c = 0.0;
      for (int m = 0; m + k < d; ++m) c += rho(m, m + k) * (psi(m) * psi(m + k));
      out(i, k) = c;
    }
  }
  return out;
}

RMatrix quadrature_density_table(const CMatrix& harmonics, std::span<const double> thetas, Exec exec) {
  const auto nt = static_cast<Eigen::Index>(thetas.size());
  const Eigen::Index nx = harmonics.rows();
  const Eigen::Index d = harmonics.cols();
  RMatrix out(nt, nx);
#pragma omp parallel for schedule(static) if (use_threads(exec))
  for (Eigen::Index t = 0; t < nt; ++t) {
    CVector phases(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      phases(k) = std::exp(Complex(0.0, static_cast<double>(k) * thetas[t]));
    }
    for (Eigen::Index i = 0; i < nx; ++i) {
      double v = harmonics(i, 0).real();
      for (Eigen::Index k = 1; k < d; ++k) v += 2.0 * (harmonics(i, k) * phases(k)).real();
      out(t, i) = std::max(v, 0.0);
    }
  }
  return out;
}

LikelihoodAccumulation accumulate_likelihood(const CMatrix& rho, const ProjectorSet& cells, Exec exec) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index n = cells.size();
  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<CMatrix> partial(static_cast<std::size_t>(chunks));
  RVector partial_ll = RVector::Zero(chunks);
#pragma omp parallel for schedule(dynamic) if (use_threads(exec))
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - begin);
    const auto kets = cells.kets.middleCols(begin, len);
    const CMatrix rk = rho * kets;
    CMatrix scaled(d, len);
    double ll = 0.0;
    for (Eigen::Index j = 0; j < len; ++j) {
      const double p = std::max(kets.col(j).dot(rk.col(j)).real(), 1e-300);
      const double count = cells.counts(begin + j);
      ll += count * std::log(p);
      scaled.col(j) = (count / p) * kets.col(j);
    }
    partial[static_cast<std::size_t>(c)] = scaled * kets.adjoint();
    partial_ll(c) = ll;
  }
  LikelihoodAccumulation out;
  out.weighted_sum = CMatrix::Zero(d, d);
  for (const auto& m : partial) out.weighted_sum += m;
  for (Eigen::Index c = 0; c < chunks; ++c) out.log_likelihood += partial_ll(c);
  return out;
}

double log_likelihood(const CMatrix& rho, const ProjectorSet& cells, Exec exec) {
  const Eigen::Index n = cells.size();
  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  RVector partial_ll = RVector::Zero(chunks);
#pragma omp parallel for schedule(static) if (use_threads(exec))
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - begin);
    const auto kets = cells.kets.middleCols(begin, len);
    const CMatrix rk = rho * kets;
    double ll = 0.0;
    for (Eigen::Index j = 0; j < len; ++j) {
      const double p = std::max(kets.col(j).dot(rk.col(j)).real(), 1e-300);
      ll += cells.counts(begin + j) * std::log(p);
    }
    partial_ll(c) = ll;
  }
  double total = 0.0;
  for (Eigen::Index c = 0; c < chunks; ++c) total += partial_ll(c);
  return total;
}

BinnedCells BinnedCells::build(std::span<const double> x_centres, std::span<const double> theta_centres,
                               RMatrix counts, int truncation) {
  const auto nx = static_cast<Eigen::Index>(x_centres.size());
  const auto nt = static_cast<Eigen::Index>(theta_centres.size());
  if (counts.rows() != nt || counts.cols() != nx) throw DimensionError("BinnedCells: counts must be nt x nx");
  const int d = truncation + 1;
  BinnedCells out;
  out.psi.resize(nx, d);
  for (Eigen::Index i = 0; i < nx; ++i) out.psi.row(i) = fock_wavefunctions(truncation, x_centres[i]).transpose();
  out.phases.resize(nt, d);
  for (Eigen::Index t = 0; t < nt; ++t) {
    for (int k = 0; k < d; ++k) out.phases(t, k) = std::polar(1.0, k * theta_centres[t]);
  }
  out.counts = std::move(counts);
  return out;
}

ProjectorSet BinnedCells::to_projectors() const {
  const Eigen::Index d = psi.cols();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> filled;
  for (Eigen::Index t = 0; t < counts.rows(); ++t) {
    for (Eigen::Index i = 0; i < counts.cols(); ++i) {
      if (counts(t, i) > 0.0) filled.emplace_back(t, i);
    }
  }
  ProjectorSet out;
  out.kets.resize(d, static_cast<Eigen::Index>(filled.size()));
  out.counts.resize(static_cast<Eigen::Index>(filled.size()));
  for (Eigen::Index c = 0; c < out.size(); ++c) {
    const auto [t, i] = filled[static_cast<std::size_t>(c)];
    for (Eigen::Index n = 0; n < d; ++n) out.kets(n, c) = phases(t, n) * psi(i, n);
    out.counts(c) = counts(t, i);
  }
  return out;
}

LikelihoodAccumulation accumulate_likelihood(const CMatrix& rho, const BinnedCells& cells, Exec exec) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index nx = cells.psi.rows();
  const Eigen::Index nt = cells.phases.rows();
  // g(i, k) = sum_t count / p * e^{-i k theta_t}: the k-th harmonic of the
  // likelihood weights in quadrature bin i.
  CMatrix g = CMatrix::Zero(nx, d);
  RVector partial_ll = RVector::Zero(nx);
#pragma omp parallel for schedule(static) if (use_threads(exec))
  for (Eigen::Index i = 0; i < nx; ++i) {
    if (cells.counts.col(i).sum() <= 0.0) continue;
    CVector b(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Complex acc = 0.0;
      for (Eigen::Index m = 0; m + k < d; ++m) acc += rho(m, m + k) * (cells.psi(i, m) * cells.psi(i, m + k));
      b(k) = acc;
    }
    double ll = 0.0;
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double count = cells.counts(t, i);
      if (count <= 0.0) continue;
      double p = b(0).real();
      for (Eigen::Index k = 1; k < d; ++k) p += 2.0 * (b(k) * cells.phases(t, k)).real();
      p = std::max(p, 1e-300);
      ll += count * std::log(p);
      const double w = count / p;
      for (Eigen::Index k = 0; k < d; ++k) g(i, k) += w * std::conj(cells.phases(t, k));
    }
    partial_ll(i) = ll;
  }
  LikelihoodAccumulation out;
  out.weighted_sum = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < nx; ++i) {
    out.log_likelihood += partial_ll(i);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (g(i, k) == Complex(0.0)) continue;
      for (Eigen::Index m = 0; m + k < d; ++m) {
        out.weighted_sum(m, m + k) += g(i, k) * (cells.psi(i, m) * cells.psi(i, m + k));
      }
    }
  }
  for (Eigen::Index k = 1; k < d; ++k) {
    for (Eigen::Index m = 0; m + k < d; ++m) out.weighted_sum(m + k, m) = std::conj(out.weighted_sum(m, m + k));
  }
  return out;
}

}  // namespace fockcat::kernels
