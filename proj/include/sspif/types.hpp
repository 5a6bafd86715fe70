#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sspif {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (I + rS) too ill-conditioned to invert reliably.
class SingularTransform : public Error {
 public:
  using Error::Error;
};

/// A stage, state or matrix contained NaN or Inf.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// An integrating-factor plan would need e^{gL} with g < 0.
class NegativeGap : public Error {
 public:
  using Error::Error;
};

class UnknownMethod : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The optimizer located no feasible point.
class NotFound : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw NonFinite(std::string("non-finite values in ") + what);
  }
}

}  // namespace sspif
