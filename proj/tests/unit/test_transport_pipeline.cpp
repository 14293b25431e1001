#include <doctest.h>

#include <cmath>
#include <random>

#include "wfr/errors.hpp"
#include "wfr/presets.hpp"
#include "wfr/transport_pipeline.hpp"

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

PipelineConfig small_eps(double eps = 1e-3) {
  PipelineConfig cfg;
  cfg.solver.epsilon = eps;
  cfg.solver.tol = 1e-11;
  cfg.solver.max_iters = 100000;
  return cfg;
}

// A hand-built single-particle set with the given knot data.
TrajectorySet single_particle(std::vector<double> times, std::vector<Vector> positions,
                              std::vector<double> masses, std::vector<KnotVelocity> velocities) {
  TrajectorySet set;
  set.dim = positions.front().size();
  set.times = std::move(times);
  ParticleTrajectory traj;
  traj.weight = 1.0;
  traj.positions = std::move(positions);
  traj.masses = std::move(masses);
  traj.velocities = std::move(velocities);
  set.particles.push_back(std::move(traj));
  return set;
}

double report_for(TrajectorySet set, int steps = 400) {
  assemble_spline(set);
  return curve_curvature_report(set, steps).total;
}

}  // namespace

TEST_CASE("identical measures give constant trajectories") {
  const auto mu = line_measure({0.0, 0.5, 1.0}, {1.0, 2.0, 0.5});
  const auto set = transport_spline({mu, mu, mu}, {0.0, 1.0, 2.0}, small_eps());
  REQUIRE(set.particles.size() == 3);
  for (const auto& p : set.particles) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(std::abs(p.positions[k][0] - p.positions[0][0]) <= 1e-12);
      CHECK(p.masses[k] == doctest::Approx(p.masses[0]).epsilon(1e-10));
      CHECK(p.velocities[k].v.norm() <= 1e-10);
      CHECK(std::abs(p.velocities[k].s) <= 1e-10);
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const auto emitted = knot_measure(set, k);
    CHECK(total_mass(emitted) == doctest::Approx(3.5).epsilon(1e-10));
  }
  const auto curve = sample_curve(set, 10);
  for (const auto& m : curve.measures) CHECK(total_mass(m) == doctest::Approx(3.5).epsilon(1e-10));
  CHECK(curve_curvature_report(set).total <= 1e-12);
}

TEST_CASE("co-located Diracs of masses 1 and 4") {
  const auto set = transport_spline({line_measure({0.2}, {1.0}), line_measure({0.2}, {4.0})},
                                    {0.0, 1.0}, small_eps(1e-4));
  REQUIRE(set.particles.size() == 1);
  const auto& p = set.particles[0];
  CHECK(p.positions[1][0] == 0.2);
  CHECK(p.weight * p.masses[0] * p.masses[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.weight * p.masses[1] * p.masses[1] == doctest::Approx(4.0).epsilon(1e-6));
  // A pure mass change along a straight cone line costs nothing.
  CHECK(curve_curvature_report(set).total <= 1e-10);
}

TEST_CASE("knot velocity estimates") {
  ParticleTrajectory still;
  still.positions = {vec({0.3, 0.1}), vec({0.3, 0.1}), vec({0.3, 0.1})};
  still.masses = {1.0, 1.0, 1.0};
  estimate_knot_velocities(still, {0, 1, 2});
  for (const auto& v : still.velocities) {
    CHECK(v.v.norm() == 0.0);
    CHECK(v.s == 0.0);
  }

  ParticleTrajectory moving;
  moving.positions = {vec({0.0}), vec({0.25}), vec({0.5}), vec({0.75})};
  moving.masses = {0.0, 1.0, 4.0, 9.0};
  estimate_knot_velocities(moving, {0, 1, 2, 3});
  for (const auto& v : moving.velocities) CHECK(v.v[0] == doctest::Approx(0.25).epsilon(1e-14));

  ParticleTrajectory parabola;
  parabola.positions = {vec({0.0}), vec({0.0}), vec({0.0})};
  parabola.masses = {0.0, 1.0, 4.0};
  estimate_knot_velocities(parabola, {0, 1, 2});
  CHECK(parabola.velocities[0].s == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(estimate_knot_velocities(parabola, {0, 1}), DimensionMismatchError);
}

TEST_CASE("mass bookkeeping on the one-dimensional preset") {
  const auto measures = one_dim_measures();
  const auto set = transport_spline(measures, one_dim_time_sets()[0]);
  CHECK(set.all_converged());
  REQUIRE(!set.particles.empty());
  double start = 0.0;
  for (const auto& p : set.particles) start += p.weight * p.masses[0] * p.masses[0];
  CHECK(std::abs(start + set.vanished_mass - total_mass(measures[0])) <= 1e-10 * total_mass(measures[0]));
  for (std::size_t k = 0; k < measures.size(); ++k) {
    CHECK(total_mass(knot_measure(set, k)) == doctest::Approx(total_mass(measures[k])).epsilon(2e-2));
  }
}

TEST_CASE("knots are reproduced exactly") {
  const auto measures = one_dim_measures();
  const auto set = transport_spline(measures, {0.0, 1.0, 2.0, 10.0});
  const auto curve = sample_curve(set, 7);
  REQUIRE(curve.knot_samples.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto idx = curve.knot_samples[k];
    CHECK(curve.times[idx] == set.times[k]);
    CHECK(curve.measures[idx] == knot_measure(set, k));
  }
  CHECK(curve.times.size() == 3 * 7 + 1);
  // The cascade lands on the next knot as well.
  for (const auto& p : set.particles) {
    for (std::size_t k = 0; k + 1 < set.times.size(); ++k) {
      const ConePoint end = decasteljau_eval(p.segments[k], 1.0);
      CHECK(end.x()[0] / set.space_scale == p.positions[k + 1][0]);
      CHECK(end.r() == p.masses[k + 1]);
    }
  }
}

TEST_CASE("segments leave the knots with the knot velocities") {
  const auto set = transport_spline(one_dim_measures(), {0.0, 1.0, 2.0, 10.0});
  double worst = 0.0;
  for (const auto& p : set.particles) {
    for (std::size_t k = 0; k + 1 < set.times.size(); ++k) {
      const auto& seg = p.segments[k];
      const auto [start, end] = endpoint_velocities(seg);
      const double to_physical = set.time_scale / seg.duration;
      auto gap = [&](const KnotVelocity& got, const KnotVelocity& want) {
        const double dv = (got.v * to_physical / set.space_scale - want.v).norm();
        const double ds = std::abs(got.s * to_physical - want.s);
        return (dv + ds) / std::max(want.v.norm() + std::abs(want.s), 1e-12);
      };
      worst = std::max({worst, gap(start, p.velocities[k]), gap(end, p.velocities[k + 1])});
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("time scale override does not change the curve") {
  const auto measures = one_dim_measures();
  auto cfg = PipelineConfig{};
  const auto base = sample_curve(transport_spline(measures, {0.0, 1.0, 2.0, 10.0}, cfg), 8);
  cfg.rescale.time_scale = 2.0;
  const auto scaled_set = transport_spline(measures, {0.0, 1.0, 2.0, 10.0}, cfg);
  CHECK(scaled_set.time_scale == 2.0);
  const auto scaled = sample_curve(scaled_set, 8);
  REQUIRE(base.measures.size() == scaled.measures.size());
  for (std::size_t i = 0; i < base.measures.size(); ++i) {
    CHECK(base.times[i] == scaled.times[i]);
    CHECK((base.measures[i].points() - scaled.measures[i].points()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((base.measures[i].weights() - scaled.measures[i].weights()).cwiseAbs().maxCoeff() <=
          1e-12 * base.measures[i].weights().maxCoeff());
  }
}

TEST_CASE("scaling every measure scales the curve") {
  auto measures = one_dim_measures();
  const auto base = sample_curve(transport_spline(measures, {0.0, 1.0, 2.0, 10.0}), 5);
  for (auto& mu : measures) mu = mu.scaled(3.0);
  const auto heavy = sample_curve(transport_spline(measures, {0.0, 1.0, 2.0, 10.0}), 5);
  REQUIRE(base.measures.size() == heavy.measures.size());
  for (std::size_t i = 0; i < base.measures.size(); ++i) {
    REQUIRE(base.measures[i].size() == heavy.measures[i].size());
    CHECK((base.measures[i].points() - heavy.measures[i].points()).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(total_mass(heavy.measures[i]) == doctest::Approx(3.0 * total_mass(base.measures[i])).epsilon(1e-8));
  }
}

TEST_CASE("runs are deterministic") {
  const auto measures = two_dim_measures({0.35, 24, 0.01, std::nullopt});
  PipelineConfig cfg;
  cfg.support_threshold = 1e-8;
  const auto a = sample_curve(transport_spline(measures, two_dim_times(), cfg), 4);
  const auto b = sample_curve(transport_spline(measures, two_dim_times(), cfg), 4);
  REQUIRE(a.measures.size() == b.measures.size());
  for (std::size_t i = 0; i < a.measures.size(); ++i) CHECK(a.measures[i] == b.measures[i]);
}

TEST_CASE("particles without a partner vanish and are accounted for") {
  const auto mu0 = line_measure({0.0, 5.0}, {1.0, 2.0});
  const auto mu1 = line_measure({0.1}, {1.0});
  const auto set = transport_spline({mu0, mu1}, {0.0, 1.0}, small_eps());
  CHECK(set.particles.size() == 1);
  CHECK(set.vanished_count == 1);
  CHECK(set.vanished_mass == 2.0);
}

TEST_CASE("marginal and mass rules") {
  const auto measures = one_dim_measures();
  for (auto rule : {MarginalRule::kForward, MarginalRule::kBackward, MarginalRule::kAverage}) {
    PipelineConfig cfg;
    cfg.marginal_rule = rule;
    const auto set = transport_spline(measures, {0.0, 1.0, 2.0, 10.0}, cfg);
    for (std::size_t k = 0; k < measures.size(); ++k) {
      CHECK(total_mass(knot_measure(set, k)) == doctest::Approx(total_mass(measures[k])).epsilon(5e-2));
    }
  }
  PipelineConfig sqrt_mu;
  sqrt_mu.mass_rule = MassRule::kSqrtMu;
  const auto set = transport_spline(measures, {0.0, 1.0, 2.0, 10.0}, sqrt_mu);
  for (const auto& p : set.particles) CHECK(p.weight == 1.0);
  CHECK(total_mass(knot_measure(set, 0)) == doctest::Approx(total_mass(measures[0])).epsilon(1e-12));
}

TEST_CASE("invalid pipeline input") {
  const auto mu = line_measure({0.0}, {1.0});
  CHECK_THROWS_AS(transport_spline({mu}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(transport_spline({mu, mu}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(transport_spline({mu, mu}, {1.0, 1.0}), NonMonotoneTimesError);
  CHECK_THROWS_AS(transport_spline({mu, line_measure({0.0}, {0.0})}, {0.0, 1.0}), EmptySupportError);
  CHECK_THROWS_AS(transport_spline({mu, DiscreteMeasure(Matrix::Zero(1, 2), vec({1.0}))}, {0.0, 1.0}),
                  DimensionMismatchError);
}

TEST_CASE("curvature of constant and pure growth trajectories") {
  const Vector x = vec({0.1});
  const auto constant = single_particle({0, 1, 2}, {x, x, x}, {1.3, 1.3, 1.3},
                                        {{vec({0}), 0.0}, {vec({0}), 0.0}, {vec({0}), 0.0}});
  CHECK(report_for(constant) == 0.0);

  // r = exp(2 b t) sampled at eleven knots with its exact rates.
  const double b = 0.1;
  std::vector<double> times;
  std::vector<Vector> pos;
  std::vector<double> mass;
  std::vector<KnotVelocity> vel;
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    times.push_back(t);
    pos.push_back(x);
    mass.push_back(std::exp(2 * b * t));
    vel.push_back({vec({0.0}), 2 * b * std::exp(2 * b * t)});
  }
  const double exact = 16 * std::pow(b, 4) * (std::exp(4 * b) - 1) / (4 * b);
  CHECK(report_for(single_particle(times, pos, mass, vel), 2000) == doctest::Approx(exact).epsilon(1e-2));
}

TEST_CASE("natural velocities of a geodesic pair beat perturbed ones") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  // Pure mass change: the spline is the geodesic itself.
  {
    auto make = [&](double s0, double s1) {
      return single_particle({0, 1}, {vec({0.2}), vec({0.2})}, {1.0, 2.0},
                             {{vec({0.0}), s0}, {vec({0.0}), s1}});
    };
    const double natural = report_for(make(1.0, 1.0));
    CHECK(natural <= 1e-12);
    for (int k = 0; k < 20; ++k) CHECK(report_for(make(1.0 + 0.2 * g(rng), 1.0 + 0.2 * g(rng))) > natural);
  }
  // Equal masses a short distance apart.
  {
    auto make = [&](const KnotVelocity& a, const KnotVelocity& b) {
      return single_particle({0, 1}, {vec({0.0}), vec({0.05})}, {1.0, 1.0}, {a, b});
    };
    ParticleTrajectory natural_traj;
    natural_traj.positions = {vec({0.0}), vec({0.05})};
    natural_traj.masses = {1.0, 1.0};
    estimate_knot_velocities(natural_traj, {0, 1});
    const auto& nv = natural_traj.velocities;
    const double natural = report_for(make(nv[0], nv[1]));
    for (int k = 0; k < 20; ++k) {
      const double scale = 0.2 * 0.05;
      const KnotVelocity a{nv[0].v + scale * vec({g(rng)}), nv[0].s + scale * g(rng)};
      const KnotVelocity b{nv[1].v + scale * vec({g(rng)}), nv[1].s + scale * g(rng)};
      CHECK(report_for(make(a, b)) > natural);
    }
  }
}
