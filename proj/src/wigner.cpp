#include "fockcat/wigner.hpp"

#include <algorithm>

#include "fockcat/kernels.hpp"

namespace fockcat {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw DomainError("grid axes need at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

void require_single_mode(const DensityMatrix& rho, const char* what) {
  if (rho.modes() != 1) throw DimensionError(std::string(what) + ": single-mode state required");
}

}  // namespace

GridSpec GridSpec::refined(int factor) const {
  GridSpec g = *this;
  g.nx = (nx - 1) * factor + 1;
  g.np = (np - 1) * factor + 1;
  return g;
}

double GridSpec::dx() const { return (x_max - x_min) / (nx - 1); }
double GridSpec::dp() const { return (p_max - p_min) / (np - 1); }

double WignerGrid::integral() const {
  if (x_axis.size() < 2 || p_axis.size() < 2) return 0.0;
  const double dx = x_axis[1] - x_axis[0];
  const double dp = p_axis[1] - p_axis[0];
  return values.sum() * dx * dp;
}

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid, Exec exec) {
  require_single_mode(rho, "wigner");
  WignerGrid out;
  out.x_axis = linspace(grid.x_min, grid.x_max, grid.nx);
  out.p_axis = linspace(grid.p_min, grid.p_max, grid.np);
  auto values = kernels::wigner_grid(rho.elements(), out.x_axis, out.p_axis, exec);
  out.values = std::move(values.real);
  out.max_imag_residue = values.max_imag;
  return out;
}

double wigner_at(const DensityMatrix& rho, double x, double p) {
  require_single_mode(rho, "wigner_at");
  const double xs[] = {x};
  const double ps[] = {p};
  return kernels::wigner_grid(rho.elements(), xs, ps, Exec::serial).real(0, 0);
}

QuadratureDensity::QuadratureDensity(const DensityMatrix& rho, double theta)
    : rotated_(rho.elements()), truncation_(rho.truncation()), theta_(theta) {
  require_single_mode(rho, "quadrature_pdf");
  const int d = truncation_ + 1;
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      rotated_(m, n) *= std::exp(Complex(0.0, (n - m) * theta));
    }
  }
}

double QuadratureDensity::operator()(double x) const {
  const RVector psi = fock_wavefunctions(truncation_, x);
  const CVector v = psi.cast<Complex>();
  return (v.transpose() * rotated_ * v)(0, 0).real();
}

QuadratureDensity quadrature_pdf(const DensityMatrix& rho, double theta) {
  return QuadratureDensity(rho, theta);
}

}  // namespace fockcat
