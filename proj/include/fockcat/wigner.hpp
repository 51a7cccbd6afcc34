#pragma once

#include <vector>

#include "fockcat/exec.hpp"
#include "fockcat/fock.hpp"

namespace fockcat {

/// Rectangular phase-space sampling grid, endpoints included.
struct GridSpec {
  double x_min = -4.0;
  double x_max = 4.0;
  int nx = 201;
  double p_min = -4.0;
  double p_max = 4.0;
  int np = 201;

  /// Same extent, (n - 1) * factor + 1 points per axis.
  GridSpec refined(int factor) const;
  double dx() const;
  double dp() const;
};

/// W(x, p) sampled on a grid; quadrature units with vacuum variance 1/2 and
/// normalization  integral W dx dp = 1.  values(i, j) = W(x_axis[i], p_axis[j]).
struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  RMatrix values;
  /// Largest |Im W| before the imaginary part was dropped.
  double max_imag_residue = 0.0;

  /// Riemann sum of W over the grid.
  double integral() const;
  double min() const { return values.minCoeff(); }
};

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid = {}, Exec exec = Exec::parallel);

/// W at a single phase-space point.
double wigner_at(const DensityMatrix& rho, double x, double p);

/// pr(x | theta) = sum_{mn} rho_mn e^{i(n-m) theta} Psi_m(x) Psi_n(x).
class QuadratureDensity {
 public:
  QuadratureDensity(const DensityMatrix& rho, double theta);

  double operator()(double x) const;
  double theta() const { return theta_; }

 private:
  CMatrix rotated_;
  int truncation_;
  double theta_;
};

QuadratureDensity quadrature_pdf(const DensityMatrix& rho, double theta);

}  // namespace fockcat
