#include "fockcat/channels.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCore>
#include <boost/math/quadrature/gauss.hpp>

#include "fockcat/linalg.hpp"

namespace fockcat {

namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

// Exponentiates a two-mode generator that conserves n1 + n2, one total-number
// block at a time.
CMatrix exp_number_conserving(const CMatrix& generator, int truncation) {
  const int d = truncation + 1;
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (int total = 0; total <= 2 * truncation; ++total) {
    std::vector<int> idx;
    for (int n1 = 0; n1 <= truncation; ++n1) {
      const int n2 = total - n1;
      if (n2 >= 0 && n2 <= truncation) idx.push_back(n1 * d + n2);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    CMatrix block(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) block(i, j) = generator(idx[i], idx[j]);
    }
    const CMatrix e = linalg::expm_antihermitian(block);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) out(idx[i], idx[j]) = e(i, j);
    }
  }
  return out;
}

// a1^dag a2 on the two-mode space: |n1, n2> -> sqrt((n1 + 1) n2) |n1 + 1, n2 - 1>.
CMatrix hop_1_from_2(int truncation) {
  const int d = truncation + 1;
  CMatrix hop = CMatrix::Zero(d * d, d * d);
  for (int n1 = 0; n1 < truncation; ++n1) {
    for (int n2 = 1; n2 <= truncation; ++n2) {
      hop((n1 + 1) * d + n2 - 1, n1 * d + n2) = std::sqrt(static_cast<double>((n1 + 1) * n2));
    }
  }
  return hop;
}

void require_two_mode(const DensityMatrix& rho, const char* what) {
  if (rho.modes() != 2) throw DimensionError(std::string(what) + ": two-mode state required");
}

void require_mode_index(int mode, const char* what) {
  if (mode != 1 && mode != 2) throw DomainError(std::string(what) + ": mode must be 1 or 2");
}

}  // namespace

BeamSplitterSpec::BeamSplitterSpec(double r) : reflectivity(r) {
  require_unit_interval(r, "beam splitter reflectivity");
}

double BeamSplitterSpec::mixing_angle() const { return std::asin(std::sqrt(reflectivity)); }

CMatrix beam_splitter_unitary(const BeamSplitterSpec& spec, int truncation) {
  const CMatrix hop = hop_1_from_2(truncation);
  const CMatrix generator = spec.mixing_angle() * (hop - hop.adjoint());
  return exp_number_conserving(generator, truncation);
}

CMatrix pockels_unitary(double delta, int truncation) {
  const CMatrix hop = hop_1_from_2(truncation);
  const CMatrix generator = Complex(0.0, 0.5 * delta) * (hop + hop.adjoint());
  return exp_number_conserving(generator, truncation);
}

double retardance_to_reflectivity(double delta) {
  const double s = std::sin(0.5 * delta);
  return s * s;
}

DensityMatrix apply_unitary(const CMatrix& unitary, const DensityMatrix& rho) {
  if (unitary.rows() != rho.dim() || unitary.cols() != rho.dim()) {
    throw DimensionError("apply_unitary: operator and state dimensions differ");
  }
  // The optical unitaries conserve photon number and are mostly zeros.
  const Eigen::SparseMatrix<Complex> u = unitary.sparseView();
  const CMatrix left = u * rho.elements();
  CMatrix out = (u.conjugate() * left.transpose()).transpose();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho.modes(), rho.truncation());
}

// ---- loss -------------------------------------------------------------------

LossChannel::LossChannel(double loss, int truncation) : loss_(loss), truncation_(truncation) {
  require_unit_interval(loss, "loss");
  const int d = truncation + 1;
  // Dilation: system is mode 1, environment mode 2 starts in vacuum.
  const CMatrix u = beam_splitter_unitary(BeamSplitterSpec(loss), truncation);
  coeffs_ = RMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int k = 0; k <= n; ++k) {
      coeffs_(k, n) = u((n - k) * d + k, n * d).real();
    }
  }
}

CMatrix LossChannel::kraus(int k) const {
  const int d = truncation_ + 1;
  CMatrix e = CMatrix::Zero(d, d);
  for (int n = k; n < d; ++n) e(n - k, n) = coeffs_(k, n);
  return e;
}

CMatrix LossChannel::apply(const CMatrix& rho) const {
  const int d = truncation_ + 1;
  CMatrix out = CMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (int k = 0; a + k < d && b + k < d; ++k) {
        acc += coeffs_(k, a + k) * coeffs_(k, b + k) * rho(a + k, b + k);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

CMatrix LossChannel::adjoint(const CMatrix& m) const {
  const int d = truncation_ + 1;
  CMatrix out = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    for (int np = 0; np < d; ++np) {
      Complex acc = 0.0;
      for (int k = 0; k <= n && k <= np; ++k) {
        acc += coeffs_(k, n) * coeffs_(k, np) * m(n - k, np - k);
      }
      out(n, np) = acc;
    }
  }
  return out;
}

CMatrix LossChannel::apply_on_mode(const CMatrix& rho12, int mode) const {
  require_mode_index(mode, "apply_on_mode");
  const int d = truncation_ + 1;
  CMatrix out = CMatrix::Zero(d * d, d * d);
  auto index = [&](int spectator, int lossy) { return mode == 2 ? spectator * d + lossy : lossy * d + spectator; };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          Complex acc = 0.0;
          for (int k = 0; a + k < d && b + k < d; ++k) {
            acc += coeffs_(k, a + k) * coeffs_(k, b + k) * rho12(index(i, a + k), index(j, b + k));
          }
          out(index(i, a), index(j, b)) = acc;
        }
      }
    }
  }
  return out;
}

DensityMatrix apply_loss(const DensityMatrix& rho, double loss) {
  if (rho.modes() != 1) throw DimensionError("apply_loss: single-mode state required");
  require_unit_interval(loss, "loss");
  if (loss == 0.0) return rho;
  LossChannel channel(loss, rho.truncation());
  CMatrix out = channel.apply(rho.elements());
  return DensityMatrix(std::move(out), 1, rho.truncation());
}

DensityMatrix apply_loss_on_mode(const DensityMatrix& rho12, int mode, double loss) {
  require_two_mode(rho12, "apply_loss_on_mode");
  require_unit_interval(loss, "loss");
  if (loss == 0.0) return rho12;
  LossChannel channel(loss, rho12.truncation());
  CMatrix out = channel.apply_on_mode(rho12.elements(), mode);
  return DensityMatrix(std::move(out), 2, rho12.truncation());
}

// ---- heralding ----------------------------------------------------------------

CMatrix herald_slice(const DensityMatrix& rho12, int measured_mode, double x) {
  require_two_mode(rho12, "herald_slice");
  require_mode_index(measured_mode, "herald_slice");
  const int d = rho12.mode_dim();
  const CVector v = fock_wavefunctions(rho12.truncation(), x).cast<Complex>();
  const CMatrix id = CMatrix::Identity(d, d);
  // P maps the kept mode into the two-mode space tensored with <x|.
  const CMatrix p = measured_mode == 2 ? linalg::kron(id, v) : linalg::kron(v, id);
  return p.transpose() * rho12.elements() * p;
}

HeraldResult herald_project(const DensityMatrix& rho12, const HeraldSpec& spec) {
  require_two_mode(rho12, "herald_project");
  require_mode_index(spec.mode, "herald_project");
  if (!(spec.halfwidth >= 0.0)) throw DomainError("herald window halfwidth must be >= 0");

  CMatrix conditional;
  bool density = false;
  if (spec.halfwidth == 0.0) {
    conditional = herald_slice(rho12, spec.mode, 0.0);
    density = true;
  } else {
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();
    const double w = spec.halfwidth;
    const int d = rho12.mode_dim();
    conditional = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // 30 points: symmetric pairs, no node at the origin.
      for (double sign : {-1.0, 1.0}) {
        conditional += (w * weights[i]) * herald_slice(rho12, spec.mode, sign * w * nodes[i]);
      }
    }
  }
  conditional = 0.5 * (conditional + conditional.adjoint()).eval();
  const double acceptance = conditional.trace().real();
  if (!(acceptance > 1e-14)) {
    throw DegenerateOutcomeError("herald_project: heralding outcome has zero probability");
  }
  DensityMatrix state(conditional / acceptance, 1, rho12.truncation());
  return HeraldResult{std::move(state), acceptance, density};
}

}  // namespace fockcat
