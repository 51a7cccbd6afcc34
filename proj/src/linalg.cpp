#include "fockcat/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace fockcat::linalg {

CMatrix expm_antihermitian(const CMatrix& generator) {
  // G = -iH  =>  exp(G) = V exp(-i lambda) V^dagger with H = iG Hermitian.
  const CMatrix h = Complex(0.0, 1.0) * generator;
  const CMatrix herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("expm_antihermitian: eigendecomposition failed");
  }
  const RVector& lambda = es.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -lambda(i)));
  }
  const CMatrix& v = es.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

CMatrix sqrt_psd(const CMatrix& m, double floor) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const RVector& lambda = es.eigenvalues();
  const double top = std::max(lambda.maxCoeff(), 0.0);
  RVector roots(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    roots(i) = lambda(i) > floor * top ? std::sqrt(lambda(i)) : 0.0;
  }
  const CMatrix& v = es.eigenvectors();
  return v * roots.cast<Complex>().asDiagonal() * v.adjoint();
}

double hermiticity_deviation(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double unitarity_defect(const CMatrix& u) {
  return (u * u.adjoint() - CMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace fockcat::linalg
