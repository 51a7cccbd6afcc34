#pragma once

#include "fockcat/fock.hpp"

namespace fockcat {

/// Intensity reflectivity R = r^2 of a two-mode beam splitter.
struct BeamSplitterSpec {
  double reflectivity = 0.0;

  explicit BeamSplitterSpec(double r);
  /// arcsin(sqrt(R)), in [0, pi/2].
  double mixing_angle() const;
};

/// Homodyne heralding on one mode (1 or 2) with acceptance window |X| <= halfwidth.
/// halfwidth == 0 is the exact X = 0 projector.
struct HeraldSpec {
  int mode = 2;
  double halfwidth = 0.0;
};

/// exp(arcsin(sqrt R) (a1^dag a2 - a1 a2^dag)) on the (N+1)^2 two-mode space.
CMatrix beam_splitter_unitary(const BeamSplitterSpec& spec, int truncation);

/// exp(i delta/2 (aH^dag aV + aV^dag aH)); mode 1 = H, mode 2 = V.
CMatrix pockels_unitary(double delta, int truncation);

/// Effective reflectivity sin^2(delta / 2) of the Pockels cell + PBS pair.
double retardance_to_reflectivity(double delta);

/// U rho U^dagger for a two-mode state.
DensityMatrix apply_unitary(const CMatrix& unitary, const DensityMatrix& rho);

/// Pure-loss channel with loss probability `loss` (transmission 1 - loss),
/// obtained by mixing the mode with vacuum on a beam splitter of reflectivity
/// `loss` and tracing out the environment. The Kraus operators
/// E_k = <k|_env U |0>_env only couple n -> n - k, so they are stored as the
/// coefficient table c(k, n) = <n-k| E_k |n>.
class LossChannel {
 public:
  LossChannel(double loss, int truncation);

  double loss() const { return loss_; }
  int truncation() const { return truncation_; }
  /// c(k, n); zero for k > n.
  const RMatrix& coefficients() const { return coeffs_; }
  /// Dense Kraus operator E_k.
  CMatrix kraus(int k) const;

  /// Single-mode application.
  CMatrix apply(const CMatrix& rho) const;
  /// Heisenberg picture: sum_k E_k^dag M E_k.
  CMatrix adjoint(const CMatrix& m) const;
  /// Apply to mode 1 or mode 2 of a two-mode operator.
  CMatrix apply_on_mode(const CMatrix& rho12, int mode) const;

 private:
  double loss_;
  int truncation_;
  RMatrix coeffs_;
};

/// Single-mode photon loss; `loss` in [0, 1].
DensityMatrix apply_loss(const DensityMatrix& rho, double loss);
/// Photon loss on mode 1 or 2 of a two-mode state.
DensityMatrix apply_loss_on_mode(const DensityMatrix& rho12, int mode, double loss);

struct HeraldResult {
  DensityMatrix state;
  /// halfwidth > 0: probability of landing in the window.
  /// halfwidth == 0: probability density at X = 0.
  double acceptance = 0.0;
  bool acceptance_is_density = false;
};

/// Conditions a two-mode state on the homodyne outcome of `spec.mode` and
/// returns the renormalized state of the other mode. Finite windows are
/// integrated with 30-point Gauss-Legendre quadrature.
HeraldResult herald_project(const DensityMatrix& rho12, const HeraldSpec& spec);

/// Unnormalized conditional operator <x| rho12 |x> on the measured mode at X = x.
CMatrix herald_slice(const DensityMatrix& rho12, int measured_mode, double x);

}  // namespace fockcat
