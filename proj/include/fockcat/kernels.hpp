#pragma once

// Data-parallel inner loops. Each kernel runs serially or under OpenMP
// depending on `exec`; both paths execute the same per-item body and write
// into disjoint, index-addressed slots, so results are bitwise identical.

#include <span>
#include <vector>

#include "fockcat/exec.hpp"
#include "fockcat/types.hpp"

namespace fockcat::kernels {

struct WignerValues {
  RMatrix real;
  double max_imag = 0.0;
};

/// W(x_i, p_j) of the single-mode operator `rho` by the Fock-basis
/// Laguerre expansion.
WignerValues wigner_grid(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                         Exec exec);

/// Phase-Fourier coefficients of the quadrature density:
///   pr(x | theta) = c_0(x) + 2 Re sum_{k>=1} c_k(x) e^{i k theta},
///   c_k(x) = sum_m rho_{m, m+k} Psi_m(x) Psi_{m+k}(x).
/// Result is (xs.size()) x (N+1).
CMatrix quadrature_harmonics(const CMatrix& rho, std::span<const double> xs, Exec exec);

/// Evaluates the quadrature density from precomputed harmonics on every
/// (theta, x) pair. Result is thetas.size() x xs.size(); negative rounding
/// noise is clipped to zero.
RMatrix quadrature_density_table(const CMatrix& harmonics, std::span<const double> thetas, Exec exec);

/// Binned homodyne outcomes. Column c of `kets` holds <n|x_theta> =
/// e^{i n theta} Psi_n(x) for the cell's bin centre; counts(c) is the number of
/// records in the cell.
struct ProjectorSet {
  CMatrix kets;
  RVector counts;

  Eigen::Index size() const { return kets.cols(); }
  double total() const { return counts.sum(); }
};

struct LikelihoodAccumulation {
  CMatrix weighted_sum;  // sum_c count_c / p_c |x_c><x_c|
  double log_likelihood = 0.0;
};

/// Evaluates p_c = <x_c|rho|x_c> for every cell and accumulates the
/// likelihood-gradient operator. Cells are processed in fixed-size chunks that
/// are merged in order, independent of the thread count. Probabilities are
/// floored at 1e-300.
LikelihoodAccumulation accumulate_likelihood(const CMatrix& rho, const ProjectorSet& cells, Exec exec);

double log_likelihood(const CMatrix& rho, const ProjectorSet& cells, Exec exec);

/// The same cells laid out on a (phase bin) x (quadrature bin) lattice. The
/// lattice lets p(x, theta) be assembled from the phase harmonics of rho at
/// each x, which costs O(nx d^2 + nt nx d) instead of O(nt nx d^2).
struct BinnedCells {
  RMatrix psi;     // nx x d, Psi_n at the quadrature bin centres
  CMatrix phases;  // nt x d, e^{i k theta} at the phase bin centres
  RMatrix counts;  // nt x nx

  static BinnedCells build(std::span<const double> x_centres, std::span<const double> theta_centres,
                           RMatrix counts, int truncation);
  /// Flattened equivalent, one column per nonempty cell.
  ProjectorSet to_projectors() const;
};

/// accumulate_likelihood over a lattice. Parallel over quadrature bins; the
/// per-bin phase sums are merged in bin order.
LikelihoodAccumulation accumulate_likelihood(const CMatrix& rho, const BinnedCells& cells, Exec exec);

}  // namespace fockcat::kernels
