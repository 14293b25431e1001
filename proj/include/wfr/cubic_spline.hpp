#pragma once

// Natural cubic spline interpolation of vector-valued knot data. Components
// share the tridiagonal system and are fitted independently.

#include <vector>

#include "wfr/discrete_measure.hpp"

namespace wfr {

struct KnotSeries {
  std::vector<double> times;
  /// One row per knot.
  Matrix values;
};

struct CubicFit {
  KnotSeries series;
  /// Second derivatives at the knots, one row per knot (zero at both ends).
  Matrix moments;
  /// First derivatives at the knots, one row per knot.
  Matrix velocities;
};

/// Throws NonMonotoneTimesError unless times rise strictly, and
/// std::invalid_argument for fewer than two knots or a row count mismatch.
CubicFit natural_cubic_fit(KnotSeries series);

/// Throws std::out_of_range outside [t_0, t_N]. Exact at the knots.
Vector cubic_eval(const CubicFit& fit, double t);

}  // namespace wfr
