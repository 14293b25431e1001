#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wfr/discrete_measure.hpp"
#include "wfr/errors.hpp"
#include "wfr/measure_io.hpp"
#include "wfr/presets.hpp"

using namespace wfr;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

DiscreteMeasure line_measure(std::initializer_list<double> xs, std::initializer_list<double> ws) {
  Matrix pts(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return DiscreteMeasure(pts, vec(ws));
}

// Composite Simpson rule, independent of the grid machinery.
template <class F>
double simpson(F f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double truncated_bump(double x, double c, double sigma, double amp) {
  const double u = (x - c) / sigma;
  return std::abs(u) <= 2.0 ? amp * std::exp(-0.5 * u * u) : 0.0;
}

}  // namespace

TEST_CASE("total mass examples") {
  CHECK(total_mass(DiscreteMeasure(1)) == 0.0);
  CHECK(total_mass(line_measure({0, 1, 2}, {1, 2, 3})) == 6.0);
  const Grid fine = uniform_grid(vec({0.0}), vec({1.0}), {4001});
  CHECK(total_mass(uniform_box(vec({0.0}), vec({1.0}), 0.5, fine)) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(line_measure({0, 1}, {1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(line_measure({0, 1}, {1, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure(Matrix::Zero(2, 1), vec({1})), std::invalid_argument);
  Matrix bad(1, 1);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DiscreteMeasure(bad, vec({1})), std::invalid_argument);
}

TEST_CASE("scaling multiplies the weights") {
  const auto mu = line_measure({0, 0.5, 1}, {0.2, 0.0, 3.0});
  const auto scaled = mu.scaled(2.5);
  CHECK(scaled.points() == mu.points());
  CHECK(total_mass(scaled) == doctest::Approx(2.5 * total_mass(mu)).epsilon(1e-15));
  CHECK_THROWS_AS(mu.scaled(-1.0), std::invalid_argument);
}

TEST_CASE("positive part drops light points") {
  const auto mu = line_measure({0, 0.5, 1, 2}, {1.0, 0.0, 1e-9, 0.5});
  CHECK(mu.positive_part().size() == 3);
  CHECK(mu.positive_part(1e-6).size() == 2);
}

TEST_CASE("sum and concatenation") {
  const auto a = line_measure({0, 1}, {1, 2});
  const auto b = line_measure({0, 1}, {0.5, 0.5});
  CHECK(total_mass(a + b) == 4.0);
  CHECK_THROWS_AS(a + line_measure({0, 2}, {1, 1}), std::invalid_argument);
  const auto c = concatenate(a, line_measure({5}, {7}));
  CHECK(c.size() == 3);
  CHECK(total_mass(c) == 10.0);
  CHECK_THROWS_AS(concatenate(a, DiscreteMeasure(Matrix::Zero(1, 2), vec({1}))), DimensionMismatchError);
}

TEST_CASE("canonical lift and projection") {
  const auto single = line_measure({0.3}, {4.0});
  const auto lifted = canonical_lift(single);
  REQUIRE(lifted.particles.size() == 1);
  CHECK(lifted.particles[0].z.r() == 1.0);
  CHECK(lifted.particles[0].z.x()[0] == 0.3);
  CHECK(lifted.particles[0].weight == 4.0);

  CHECK(canonical_lift(DiscreteMeasure(2)).particles.empty());

  LiftedMeasure lam{1, {{ConePoint(vec({0.7}), 2.0), 1.0}, {ConePoint(vec({0.1}), 0.0), 3.0}}};
  const auto proj = project_lift(lam);
  CHECK(total_mass(proj) == 4.0);

  const auto mu = line_measure({0, 0.25, 0.5}, {0.1, 0.7, 1.3});
  CHECK(project_lift(canonical_lift(mu)) == mu);
}

TEST_CASE("uniform grid includes the corners") {
  const Grid g = uniform_grid(vec({0.0, -1.0}), vec({1.0, 1.0}), {3, 5});
  CHECK(g.points.rows() == 15);
  CHECK(g.cell_volume == doctest::Approx(0.5 * 0.5));
  Vector lo = g.points.colwise().minCoeff();
  Vector hi = g.points.colwise().maxCoeff();
  CHECK(lo == vec({0.0, -1.0}));
  CHECK(hi == vec({1.0, 1.0}));
  CHECK_THROWS_AS(uniform_grid(vec({0.0}), vec({1.0}), {1}), std::invalid_argument);
}

TEST_CASE("gaussian bump at a node and beyond the window") {
  const Grid g = uniform_grid(vec({0.0}), vec({1.0}), {101});
  const double sigma = 0.06;
  const auto mu = gaussian_bump(vec({0.5}), sigma, 2.0, g);
  bool found_center = false;
  for (Index i = 0; i < mu.size(); ++i) {
    const double x = mu.point(i)[0];
    if (std::abs(x - 0.5) < 1e-12) {
      CHECK(mu.weight(i) == doctest::Approx(2.0 * g.cell_volume).epsilon(1e-15));
      found_center = true;
    }
    if (std::abs(x - 0.5) >= 3 * sigma - 1e-12) {
      CHECK(mu.weight(i) == 0.0);
    }
  }
  CHECK(found_center);
}

TEST_CASE("truncation windows") {
  const Grid g = uniform_grid(vec({-3.0, -3.0}), vec({3.0, 3.0}), {61, 61});
  const Vector c = vec({1.5, 0.0});
  auto support_radius = [&](const DiscreteMeasure& mu, const Vector& from) {
    double r = 0.0;
    for (Index i = 0; i < mu.size(); ++i)
      if (mu.weight(i) > 0.0) r = std::max(r, (mu.point(i) - from).norm());
    return r;
  };
  const auto scaled = gaussian_bump(c, 0.1, 1.0, g, TruncationWindow::sigma_scaled());
  CHECK(support_radius(scaled, c) <= 0.2 + 1e-12);
  const auto absolute = gaussian_bump(c, 0.5, 1.0, g, TruncationWindow::absolute(0.6));
  CHECK(support_radius(absolute, c) <= 0.6 + 1e-12);
  const auto ball = gaussian_bump(c, 0.5, 1.0, g, TruncationWindow::fixed_ball(2.0));
  CHECK(support_radius(ball, Vector::Zero(2)) <= 2.0 + 1e-12);
  CHECK(support_radius(ball, c) > 1.0);
}

TEST_CASE("one-dimensional preset masses on the unit interval") {
  const double s = 0.06;
  const OneDimPreset preset{0.0, 1.0, 1001, s};
  const auto measures = one_dim_measures(preset);
  const double bump = simpson([&](double x) { return truncated_bump(x, 0.5, s, 1.0); }, 0.0, 1.0);
  const double pair_half = simpson(
      [&](double x) { return truncated_bump(x, 0.3, s, 0.5) + truncated_bump(x, 0.7, s, 0.5); }, 0.0, 1.0);
  const double expected[] = {bump, pair_half, 2.0 * pair_half, 0.5};
  REQUIRE(measures.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(total_mass(measures[k]) == doctest::Approx(expected[k]).epsilon(1e-2));
  }
}

TEST_CASE("subsampling the support") {
  const auto mu = line_measure({0, 1, 2, 3, 4}, {1.0, 0.0, 2.0, 0.5, 0.5});
  const auto all = subsample_support(mu, 4, 42);
  CHECK(all.size() == 4);
  CHECK(total_mass(all) == doctest::Approx(4.0).epsilon(1e-15));
  std::vector<double> xs;
  for (Index i = 0; i < all.size(); ++i) {
    xs.push_back(all.point(i)[0]);
    CHECK(all.weight(i) == doctest::Approx(1.0).epsilon(1e-15));
  }
  std::sort(xs.begin(), xs.end());
  CHECK(xs == std::vector<double>{0, 2, 3, 4});

  const auto one = subsample_support(mu, 1, 42);
  CHECK(one.size() == 1);
  CHECK(one.weight(0) == 4.0);

  CHECK(subsample_support(mu, 3, 9) == subsample_support(mu, 3, 9));
  CHECK(total_mass(subsample_support(mu, 17, 9)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(subsample_support(line_measure({0}, {0.0}), 1, 0), EmptySupportError);
  CHECK_THROWS_AS(subsample_support(mu, 0, 0), std::invalid_argument);
}

TEST_CASE("measure csv round trip") {
  const auto mu = [] {
    Matrix pts(3, 2);
    pts << 0.1, -2.5e-7, 1.0 / 3.0, 4.0, -0.0, 1e300;
    return DiscreteMeasure(pts, vec({0.25, 1.0 / 7.0, 0.0}));
  }();
  std::stringstream buf;
  write_measure_csv(buf, mu);
  CHECK(buf.str().rfind("x1,x2,mass\n", 0) == 0);
  CHECK(read_measure_csv(buf) == mu);
}

TEST_CASE("malformed measure files") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_measure_csv(in);
  };
  CHECK_THROWS_AS(parse(""), MeasureFormatError);
  CHECK_THROWS_AS(parse("x,mass\n0,1\n"), MeasureFormatError);
  CHECK_THROWS_AS(parse("x1,weight\n0,1\n"), MeasureFormatError);
  CHECK_THROWS_AS(parse("x1,mass\n0,abc\n"), MeasureFormatError);
  CHECK_THROWS_AS(parse("x1,mass\n0,1,2\n"), MeasureFormatError);
  CHECK_THROWS_AS(parse("x1,mass\n0,-1\n"), MeasureFormatError);
  const auto ok = parse("x1,x2,mass\r\n 0.5, 1 ,2\r\n\r\n-1,+3,0\r\n");
  CHECK(ok.size() == 2);
  CHECK(ok.dim() == 2);
  CHECK(total_mass(ok) == 2.0);
}
