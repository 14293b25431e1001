#include <doctest.h>

#include <cmath>
#include <random>

#include "wfr/cubic_spline.hpp"
#include "wfr/errors.hpp"

using namespace wfr;

namespace {

CubicFit fit_scalar(std::vector<double> t, std::vector<double> y) {
  Matrix values(static_cast<Index>(y.size()), 1);
  for (std::size_t i = 0; i < y.size(); ++i) values(static_cast<Index>(i), 0) = y[i];
  return natural_cubic_fit({std::move(t), values});
}

}  // namespace

TEST_CASE("collinear knots give the line") {
  const auto fit = fit_scalar({0, 1, 2}, {0, 1, 2});
  for (Index i = 0; i < 3; ++i) CHECK(fit.velocities(i, 0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double t : {0.0, 0.3, 1.0, 1.7, 2.0}) CHECK(cubic_eval(fit, t)[0] == doctest::Approx(t).epsilon(1e-15));
}

TEST_CASE("parabola knots") {
  const auto fit = fit_scalar({0, 1, 2}, {0, 1, 4});
  CHECK(fit.moments(1, 0) == doctest::Approx(3.0));
  CHECK(fit.moments(0, 0) == 0.0);
  CHECK(fit.moments(2, 0) == 0.0);
  CHECK(fit.velocities(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  // S(t) = t^3 / 2 + t / 2 on the first interval.
  CHECK(cubic_eval(fit, 0.5)[0] == doctest::Approx(0.3125).epsilon(1e-15));
}

TEST_CASE("two knots interpolate linearly") {
  const auto fit = fit_scalar({0.5, 3.0}, {1.0, -4.0});
  CHECK(fit.velocities(0, 0) == doctest::Approx(-2.0));
  CHECK(fit.velocities(1, 0) == doctest::Approx(-2.0));
  CHECK(cubic_eval(fit, 1.75)[0] == doctest::Approx(-1.5));
}

TEST_CASE("knot values are reproduced exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> gap(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<double> t{g(rng)};
    for (int i = 1; i < n; ++i) t.push_back(t.back() + gap(rng));
    Matrix values(n, 3);
    for (Index i = 0; i < values.size(); ++i) values.data()[i] = g(rng);
    const auto fit = natural_cubic_fit({t, values});
    for (int i = 0; i < n; ++i) {
      CHECK(cubic_eval(fit, t[static_cast<std::size_t>(i)]) == values.row(i).transpose());
    }
  }
}

TEST_CASE("natural boundary and continuity") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const std::vector<double> t{0.0, 0.7, 1.5, 2.0, 3.2};
  Matrix values(5, 2);
  for (Index i = 0; i < values.size(); ++i) values.data()[i] = g(rng);
  const auto fit = natural_cubic_fit({t, values});
  const double h = 1e-4;
  auto second = [&](double s) -> Vector {
    return (cubic_eval(fit, s + h) - 2 * cubic_eval(fit, s) + cubic_eval(fit, s - h)) / (h * h);
  };
  auto first = [&](double s) -> Vector { return (cubic_eval(fit, s + h) - cubic_eval(fit, s - h)) / (2 * h); };
  // Second derivative vanishes at the ends.
  CHECK(second(t.front() + h).norm() <= 1e-3 * (1 + values.norm()));
  CHECK(second(t.back() - h).norm() <= 1e-3 * (1 + values.norm()));
  // First and second derivatives are continuous at interior knots and match
  // the reported velocities and moments.
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const auto k = static_cast<Index>(i);
    CHECK((first(t[i]) - fit.velocities.row(k).transpose()).norm() <= 1e-6);
    // The third derivative jumps at a knot, so this stencil is only O(h).
    CHECK((second(t[i]) - fit.moments.row(k).transpose()).norm() <= 1e-2);
  }
}

TEST_CASE("invalid knot series") {
  CHECK_THROWS_AS(fit_scalar({0, 1, 1}, {0, 1, 2}), NonMonotoneTimesError);
  CHECK_THROWS_AS(fit_scalar({0, 2, 1}, {0, 1, 2}), NonMonotoneTimesError);
  CHECK_THROWS_AS(fit_scalar({0}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(natural_cubic_fit({{0, 1, 2}, Matrix::Zero(2, 1)}), std::invalid_argument);
  const auto fit = fit_scalar({0, 1}, {0, 1});
  CHECK_THROWS_AS(cubic_eval(fit, -0.1), std::out_of_range);
  CHECK_THROWS_AS(cubic_eval(fit, 1.1), std::out_of_range);
}
