#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wfr {

// Geometry failures.

/// Operation touched the cone vertex where the metric or the geodesic local
/// time is undefined.
class VertexError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Pair of cone points outside the half-pi ball used for splines.
class GeodesicDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An intermediate De Casteljau point pair left the half-pi ball.
class CascadeDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Finite-difference stencil does not fit in the admissible time window.
class StepError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InfeasibleVelocityError : public std::domain_error {
 public:
  enum class Bound { kStartMassRate, kEndMassRate };

  InfeasibleVelocityError(Bound bound, const std::string& what)
      : std::domain_error(what), bound_(bound) {}

  Bound bound() const { return bound_; }

 private:
  Bound bound_;
};

// Input validation.

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidScaleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptySupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonMonotoneTimesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transport maps.

class DanglingSourceError : public std::domain_error {
 public:
  DanglingSourceError(std::size_t row, const std::string& what)
      : std::domain_error(what), row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Every target is at least half-pi away from the query point.
class ZeroWeightError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Verification harness.

class GradientMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wfr
