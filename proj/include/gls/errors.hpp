#ifndef GLS_ERRORS_HPP
#define GLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gls {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// QR detected a (numerically) rank-deficient matrix.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class SingularTriangular : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

// Cholesky pivot failure.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Covariance matrix is not positive definite where the method requires it.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

// The projected covariance Q_N' Sigma Q_N is singular: the augmented
// system has no unique solution and the GLM is ill posed.
class NullspaceSingular : public Error {
 public:
  using Error::Error;
};

class SingularD : public Error {
 public:
  using Error::Error;
};

class SingularProjectedGram : public Error {
 public:
  using Error::Error;
};

class BadMultiplicities : public Error {
 public:
  using Error::Error;
};

// Problem exceeds the size guard of a dense diagnostic routine.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class UnstableSimulation : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gls

#endif  // GLS_ERRORS_HPP
