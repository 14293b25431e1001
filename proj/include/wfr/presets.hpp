#pragma once

// Measures of the one- and two-dimensional interpolation experiments.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfr/discrete_measure.hpp"

namespace wfr {

struct OneDimPreset {
  double lo = -0.2;
  double hi = 1.2;
  Index resolution = 512;
  double sigma = 0.06;
};

/// Bump at 1/2; half the bumps at 0.3 and 0.7; the full pair; half the
/// indicator of [0, 1].
std::vector<DiscreteMeasure> one_dim_measures(const OneDimPreset& preset = {});

/// The three knot-time sets of the one-dimensional experiment.
std::vector<std::vector<double>> one_dim_time_sets();

struct TwoDimPreset {
  double half_width = 0.35;
  Index resolution = 96;
  double sigma = 0.01;
  std::optional<TruncationWindow> window;
};

/// A wide central bump; three narrow bumps; two narrow bumps further out; a
/// wide bump shifted right.
std::vector<DiscreteMeasure> two_dim_measures(const TwoDimPreset& preset = {});

std::vector<double> two_dim_times();

}  // namespace wfr
