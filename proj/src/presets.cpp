#include "wfr/presets.hpp"

#include <cmath>

namespace wfr {

namespace {

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) {
    v[k++] = x;
  }
  return v;
}

}  // namespace

std::vector<DiscreteMeasure> one_dim_measures(const OneDimPreset& preset) {
  const Grid grid = uniform_grid(point({preset.lo}), point({preset.hi}), {preset.resolution});
  const double s = preset.sigma;
  auto bump = [&](double c, double amp) { return gaussian_bump(point({c}), s, amp, grid); };
  return {bump(0.5, 1.0), bump(0.3, 0.5) + bump(0.7, 0.5), bump(0.3, 1.0) + bump(0.7, 1.0),
          uniform_box(point({0.0}), point({1.0}), 0.5, grid)};
}

std::vector<std::vector<double>> one_dim_time_sets() {
  return {{0.0, 1.0, 2.0, 10.0}, {0.0, 10.0 / 3.0, 20.0 / 3.0, 10.0}, {0.0, 8.0, 9.0, 10.0}};
}

std::vector<DiscreteMeasure> two_dim_measures(const TwoDimPreset& preset) {
  const double w = preset.half_width;
  const Grid grid =
      uniform_grid(point({-w, -w}), point({w, w}), {preset.resolution, preset.resolution});
  const double s = preset.sigma;
  const auto& win = preset.window;
  auto bump = [&](double x, double y, double scale, double amp) {
    return gaussian_bump(point({x, y}), scale, amp, grid, win);
  };
  const double a = std::sqrt(2.0) / 20.0;
  const double b = 3.0 / 20.0;
  return {bump(0.0, 0.0, 2.0 * s, 0.75),
          bump(a, a, s, 0.65) + bump(0.0, -a, s, 0.65) + bump(a, -a, s, 0.65),
          bump(b, b, s, 0.75) + bump(b, -b, s, 0.75), bump(0.2, 0.0, 2.0 * s, 1.0)};
}

std::vector<double> two_dim_times() { return {0.0, 1.0, 2.0, 3.0}; }

}  // namespace wfr
