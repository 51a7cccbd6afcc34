#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fockcat {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr int kDefaultTruncation = 20;

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map failures onto exit codes in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested Fock level or amplitude does not fit the truncated basis.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Operands live on different spaces (truncation or mode count).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A projection or normalization annihilated the state.
class DegenerateOutcomeError : public Error {
 public:
  using Error::Error;
};

// Iterative method stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fockcat
