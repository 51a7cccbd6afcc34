#pragma once

#include <vector>

#include "fockcat/types.hpp"

namespace fockcat {

/// Pure single-mode state over Fock levels 0..N.
class FockVector {
 public:
  FockVector(CVector amplitudes, int truncation);

  static FockVector zero(int truncation);

  int truncation() const { return truncation_; }
  int dim() const { return truncation_ + 1; }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int n) const { return amplitudes_(n); }

  double norm() const { return amplitudes_.norm(); }
  /// Throws DegenerateOutcomeError for a (numerically) zero vector.
  FockVector normalized() const;

  /// <this|other>; rejects mismatched truncations.
  Complex inner(const FockVector& other) const;

 private:
  CVector amplitudes_;
  int truncation_;
};

/// Density operator on one or two truncated modes. Two-mode states use the
/// index n1 * (N+1) + n2, i.e. mode 1 is the slow index.
class DensityMatrix {
 public:
  /// Checks shape, Hermiticity (1e-10) and finiteness. Positivity is checked
  /// separately by min_eigenvalue() since it needs a diagonalization.
  DensityMatrix(CMatrix elements, int modes, int truncation);

  static DensityMatrix pure(const FockVector& psi);
  /// Product state a (x) b.
  static DensityMatrix product(const DensityMatrix& a, const DensityMatrix& b);
  /// Diagonal state with the given (unnormalized) Fock weights.
  static DensityMatrix diagonal(const std::vector<double>& weights, int truncation);

  int modes() const { return modes_; }
  int truncation() const { return truncation_; }
  int mode_dim() const { return truncation_ + 1; }
  int dim() const { return static_cast<int>(elements_.rows()); }
  const CMatrix& elements() const { return elements_; }
  Complex operator()(int i, int j) const { return elements_(i, j); }

  double trace() const { return elements_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  /// Hermitian, unit trace (1e-10) and eigenvalues >= -1e-9.
  bool is_valid() const;

  DensityMatrix normalized() const;
  /// Fock populations of a single-mode state.
  RVector populations() const;
  /// Reduced state of mode 1 or mode 2 of a two-mode state.
  DensityMatrix partial_trace_keep(int mode) const;

 private:
  CMatrix elements_;
  int modes_;
  int truncation_;
};

void require_same_space(const DensityMatrix& a, const DensityMatrix& b, const char* what);

enum class Parity { odd, even };

/// Target squeezed coherent-state superposition S(z)(|alpha> +- |-alpha>).
struct ScssParams {
  double alpha = 0.0;
  double z = 0.0;
  Parity parity = Parity::odd;

  double squeezing_db() const;
  static double z_from_db(double db);
};

// ---- states and operators -------------------------------------------------

FockVector fock_state(int n, int truncation);

/// Unnormalized coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) over 0..N.
/// Enforces |alpha|^2 <= N/3.
CVector coherent_amplitudes(Complex alpha, int truncation);

/// Coherent state renormalized over the truncated basis.
FockVector coherent_state(Complex alpha, int truncation);

/// Annihilation operator on 0..N.
CMatrix annihilation(int truncation);
CMatrix number_operator(int truncation);
CMatrix parity_operator(int truncation);

/// S(z) = exp(1/2 (z a^2 - z a^dag^2)) for real z, as the exponential of the
/// truncated generator. |z| <= 1.5 is enforced.
CMatrix squeeze_operator(double z, int truncation);

/// Normalized S(z)(|alpha> +- |-alpha>) projected onto 0..N. The projection is
/// exact: S(z)|alpha> is generated from its eigen-relation
/// (a cosh z + a^dag sinh z) psi = alpha psi, so neither the coherent state nor
/// the squeezer is truncated along the way.
FockVector cat_state(const ScssParams& params, int truncation);


/// Uhlmann fidelity [tr sqrt(sqrt(a) b sqrt(a))]^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
/// <psi|rho|psi> for normalized psi.
double fidelity(const DensityMatrix& rho, const FockVector& psi);

// ---- quadrature representation ----------------------------------------------

/// Psi_n(x) for X = (a + a^dag)/sqrt(2), by the three-term Hermite recurrence.
double fock_wavefunction(int n, double x);
/// Psi_0(x) .. Psi_N(x) in one pass.
RVector fock_wavefunctions(int truncation, double x);

/// Variance of X_theta on a single-mode state.
double quadrature_variance(const DensityMatrix& rho, double theta = 0.0);

}  // namespace fockcat
