#include "fockcat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fockcat/linalg.hpp"

namespace fockcat {

namespace {

void require_truncation(int truncation) {
  if (truncation < 1) {
    throw DomainError("truncation must be >= 1, got " + std::to_string(truncation));
  }
}

}  // namespace

// ---- FockVector ---------------------------------------------------------------

FockVector::FockVector(CVector amplitudes, int truncation)
    : amplitudes_(std::move(amplitudes)), truncation_(truncation) {
  require_truncation(truncation);
  if (amplitudes_.size() != truncation + 1) {
    throw DimensionError("FockVector: expected " + std::to_string(truncation + 1) +
                         " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
}

FockVector FockVector::zero(int truncation) {
  return FockVector(CVector::Zero(truncation + 1), truncation);
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (!(n > 1e-300) || !std::isfinite(n)) {
    throw DegenerateOutcomeError("cannot normalize a zero state vector");
  }
  return FockVector(amplitudes_ / n, truncation_);
}

Complex FockVector::inner(const FockVector& other) const {
  if (other.truncation_ != truncation_) {
    throw DimensionError("inner product across truncations");
  }
  return amplitudes_.dot(other.amplitudes_);
}

// ---- DensityMatrix --------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix elements, int modes, int truncation)
    : elements_(std::move(elements)), modes_(modes), truncation_(truncation) {
  require_truncation(truncation);
  if (modes != 1 && modes != 2) {
    throw DimensionError("DensityMatrix supports 1 or 2 modes, got " + std::to_string(modes));
  }
  const Eigen::Index expected = modes == 1 ? truncation + 1 : (truncation + 1) * (truncation + 1);
  if (elements_.rows() != expected || elements_.cols() != expected) {
    std::ostringstream msg;
    msg << "DensityMatrix: expected " << expected << "x" << expected << ", got " << elements_.rows()
        << "x" << elements_.cols();
    throw DimensionError(msg.str());
  }
  if (!elements_.allFinite()) {
    throw DomainError("DensityMatrix: non-finite element");
  }
  const double scale = std::max(1.0, elements_.cwiseAbs().maxCoeff());
  if (linalg::hermiticity_deviation(elements_) > 1e-10 * scale) {
    throw DomainError("DensityMatrix: matrix is not Hermitian");
  }
}

DensityMatrix DensityMatrix::pure(const FockVector& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint(), 1, psi.truncation());
}

DensityMatrix DensityMatrix::product(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.modes() != 1 || b.modes() != 1) {
    throw DimensionError("product: both factors must be single-mode");
  }
  if (a.truncation() != b.truncation()) {
    throw DimensionError("product: truncation mismatch");
  }
  return DensityMatrix(linalg::kron(a.elements(), b.elements()), 2, a.truncation());
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& weights, int truncation) {
  if (static_cast<int>(weights.size()) > truncation + 1) {
    throw TruncationError("diagonal: more weights than Fock levels");
  }
  CMatrix m = CMatrix::Zero(truncation + 1, truncation + 1);
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (weights[n] < 0.0) throw DomainError("diagonal: negative weight");
    m(n, n) = weights[n];
  }
  return DensityMatrix(std::move(m), 1, truncation).normalized();
}

double DensityMatrix::purity() const { return (elements_ * elements_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  return linalg::hermitian_eigenvalues(elements_).minCoeff();
}

bool DensityMatrix::is_valid() const {
  return linalg::hermiticity_deviation(elements_) <= 1e-10 && std::abs(trace() - 1.0) <= 1e-10 &&
         min_eigenvalue() >= -1e-9;
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  if (!(t > 1e-300)) {
    throw DegenerateOutcomeError("cannot normalize a density matrix with zero trace");
  }
  CMatrix m = elements_ / t;
  // Remove rounding-level anti-Hermitian residue so repeated operations stay Hermitian.
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m), modes_, truncation_);
}

RVector DensityMatrix::populations() const {
  if (modes_ != 1) throw DimensionError("populations: single-mode state required");
  return elements_.diagonal().real();
}

DensityMatrix DensityMatrix::partial_trace_keep(int mode) const {
  if (modes_ != 2) throw DimensionError("partial_trace_keep: two-mode state required");
  if (mode != 1 && mode != 2) throw DomainError("partial_trace_keep: mode must be 1 or 2");
  const int d = mode_dim();
  CMatrix out = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < d; ++k) {
        acc += mode == 1 ? elements_(i * d + k, j * d + k) : elements_(k * d + i, k * d + j);
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out), 1, truncation_);
}

void require_same_space(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (a.modes() != b.modes() || a.truncation() != b.truncation()) {
    throw DimensionError(std::string(what) + ": operands live on different spaces");
  }
}

// ---- ScssParams -----------------------------------------------------------------

double ScssParams::squeezing_db() const { return 20.0 * z / std::numbers::ln10; }

double ScssParams::z_from_db(double db) { return std::numbers::ln10 * db / 20.0; }

// ---- states and operators -------------------------------------------------------

FockVector fock_state(int n, int truncation) {
  require_truncation(truncation);
  if (n < 0 || n > truncation) {
    throw TruncationError("fock_state: level " + std::to_string(n) + " outside 0.." +
                          std::to_string(truncation));
  }
  CVector v = CVector::Zero(truncation + 1);
  v(n) = 1.0;
  return FockVector(std::move(v), truncation);
}

CVector coherent_amplitudes(Complex alpha, int truncation) {
  require_truncation(truncation);
  if (std::norm(alpha) > truncation / 3.0) {
    std::ostringstream msg;
    msg << "coherent_state: |alpha|^2 = " << std::norm(alpha) << " exceeds N/3 = " << truncation / 3.0;
    throw TruncationError(msg.str());
  }
  CVector v(truncation + 1);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= truncation; ++n) {
    v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  return v;
}

FockVector coherent_state(Complex alpha, int truncation) {
  return FockVector(coherent_amplitudes(alpha, truncation), truncation).normalized();
}

CMatrix annihilation(int truncation) {
  CMatrix a = CMatrix::Zero(truncation + 1, truncation + 1);
  for (int n = 1; n <= truncation; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix number_operator(int truncation) {
  CMatrix m = CMatrix::Zero(truncation + 1, truncation + 1);
  for (int n = 0; n <= truncation; ++n) m(n, n) = n;
  return m;
}

CMatrix parity_operator(int truncation) {
  CMatrix m = CMatrix::Zero(truncation + 1, truncation + 1);
  for (int n = 0; n <= truncation; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return m;
}

CMatrix squeeze_operator(double z, int truncation) {
  require_truncation(truncation);
  if (std::abs(z) > 1.5) {
    throw DomainError("squeeze_operator: |z| must be <= 1.5");
  }
  const CMatrix a = annihilation(truncation);
  const CMatrix a2 = a * a;
  const CMatrix generator = 0.5 * z * (a2 - a2.adjoint());
  return linalg::expm_antihermitian(generator);
}

FockVector cat_state(const ScssParams& params, int truncation) {
  require_truncation(truncation);
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha)) {
    throw DomainError("cat_state: alpha must be finite and >= 0");
  }
  if (!std::isfinite(params.z)) throw DomainError("cat_state: z must be finite");
  if (params.parity == Parity::odd && params.alpha == 0.0) {
    throw DegenerateOutcomeError("cat_state: odd cat with alpha = 0 is the zero vector");
  }
  // u_n = <n|S(z)|alpha> / <0|S(z)|alpha>. S(z)|-alpha> has the same u_0 and
  // flipped odd components, so the cat is the even or odd part of u.
  const double ch = std::cosh(params.z);
  const double sh = std::sinh(params.z);
  RVector u = RVector::Zero(truncation + 1);
  u(0) = 1.0;
  u(1) = params.alpha / ch;
  for (int n = 1; n < truncation; ++n) {
    u(n + 1) = (params.alpha * u(n) - sh * std::sqrt(static_cast<double>(n)) * u(n - 1)) /
               (ch * std::sqrt(static_cast<double>(n + 1)));
  }
  const int keep = params.parity == Parity::odd ? 1 : 0;
  CVector v = CVector::Zero(truncation + 1);
  for (int n = keep; n <= truncation; n += 2) v(n) = u(n);
  return FockVector(std::move(v), truncation).normalized();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_space(a, b, "fidelity");
  // F = (sum of singular values of sqrt(a) sqrt(b))^2, which avoids taking the
  // square root of the noisy small eigenvalues of sqrt(a) b sqrt(a).
  const CMatrix sa = linalg::sqrt_psd(a.elements());
  const CMatrix sb = linalg::sqrt_psd(b.elements());
  Eigen::JacobiSVD<CMatrix> svd(sa * sb);
  const double f = svd.singularValues().sum();
  return std::clamp(f * f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const FockVector& psi) {
  if (rho.modes() != 1 || rho.truncation() != psi.truncation()) {
    throw DimensionError("fidelity: state and vector live on different spaces");
  }
  const CVector& v = psi.amplitudes();
  const double f = (v.adjoint() * rho.elements() * v)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

// ---- quadrature representation ----------------------------------------------------

RVector fock_wavefunctions(int truncation, double x) {
  RVector psi(truncation + 1);
  psi(0) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (truncation >= 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n < truncation; ++n) {
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * psi(n - 1);
  }
  return psi;
}

double fock_wavefunction(int n, double x) {
  if (n < 0) throw DomainError("fock_wavefunction: negative level");
  if (n == 0) return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  return fock_wavefunctions(n, x)(n);
}

double quadrature_variance(const DensityMatrix& rho, double theta) {
  if (rho.modes() != 1) throw DimensionError("quadrature_variance: single-mode state required");
  const CMatrix a = annihilation(rho.truncation());
  const Complex phase = std::exp(Complex(0.0, -theta));
  const CMatrix x = (phase * a + std::conj(phase) * a.adjoint()) / std::sqrt(2.0);
  const double mean = (rho.elements() * x).trace().real();
  const double second = (rho.elements() * x * x).trace().real();
  return second - mean * mean;
}

}  // namespace fockcat
