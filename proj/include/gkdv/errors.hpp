#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array sizes, grids or representations do not line up.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A spectrum that should describe a real field is not Hermitian.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied function returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Symbol does not satisfy the structural hypotheses on the scanned range.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// (p, k) outside the contraction regime p > 3k/2 + 1.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// The frequency lattice is too small to resolve a maximizer.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  using Error::Error;
};

/// A Picard iterate left the ball of radius 10 r.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gkdv
