#pragma once

#include <stdexcept>
#include <string>

namespace hartree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received arguments outside its domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Power-law potential evaluated at (or averaged over a cell containing) the origin.
class SingularOriginError : public Error {
 public:
  using Error::Error;
};

/// A requested L^1 tail integral of |x||grad V| diverges.
class NonIntegrableTailError : public Error {
 public:
  using Error::Error;
};

/// A transform-based convolution left an imaginary residue above tolerance.
class ImaginaryResidueError : public Error {
 public:
  using Error::Error;
};

/// The propagator produced NaN or Inf samples.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A random sample fell on a degenerate configuration (e.g. x == y).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires a radial ensemble received a non-radial one.
class NonRadialError : public Error {
 public:
  using Error::Error;
};

}  // namespace hartree
