#include "wfr/transport_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wfr/cubic_spline.hpp"
#include "wfr/errors.hpp"

namespace wfr {

namespace {

void validate_inputs(const std::vector<DiscreteMeasure>& measures,
                     const std::vector<double>& times) {
  if (measures.size() < 2) {
    throw std::invalid_argument("transport spline: need at least two measures");
  }
  if (times.size() != measures.size()) {
    throw std::invalid_argument("transport spline: " + std::to_string(times.size()) +
                                " knot times for " + std::to_string(measures.size()) +
                                " measures");
  }
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k]) || !std::isfinite(times[k]) || !std::isfinite(times[k + 1])) {
      throw NonMonotoneTimesError("transport spline: knot times must increase strictly");
    }
  }
  for (const auto& mu : measures) {
    if (mu.dim() != measures.front().dim()) {
      throw DimensionMismatchError("transport spline: measures differ in dimension");
    }
    if (!(total_mass(mu) > 0.0)) {
      throw EmptySupportError("transport spline: every measure needs positive mass");
    }
  }
}

// Kernel-weighted average of the point masses of mu around q; exact on the
// support.
double smoothed_point_mass(const DiscreteMeasure& mu, double eps, const Vector& q) {
  for (Index j = 0; j < mu.size(); ++j) {
    if ((mu.point(j) - q).squaredNorm() == 0.0) {
      return mu.weight(j);
    }
  }
  double top = -std::numeric_limits<double>::infinity();
  Vector logk(mu.size());
  for (Index j = 0; j < mu.size(); ++j) {
    logk[j] = -transport_cost(q, mu.point(j)) / eps;
    top = std::max(top, logk[j]);
  }
  if (!std::isfinite(top)) {
    return 0.0;
  }
  double num = 0.0;
  double den = 0.0;
  for (Index j = 0; j < mu.size(); ++j) {
    const double k = std::exp(logk[j] - top);
    num += k * mu.weight(j);
    den += k;
  }
  return num / den;
}

}  // namespace

bool TrajectorySet::all_converged() const {
  return std::all_of(segments.begin(), segments.end(),
                     [](const SegmentDiagnostics& s) { return s.converged; });
}

TrajectorySet build_trajectories(const std::vector<DiscreteMeasure>& measures,
                                 const std::vector<double>& times, const PipelineConfig& config) {
  validate_inputs(measures, times);
  if (!(config.support_threshold >= 0.0 && config.support_threshold < 1.0)) {
    throw std::invalid_argument("transport spline: support threshold must lie in [0, 1)");
  }
  const std::size_t n_knots = measures.size();
  std::vector<DiscreteMeasure> mus;
  mus.reserve(n_knots);
  for (const auto& mu : measures) {
    mus.push_back(mu.positive_part(config.support_threshold));
  }

  TrajectorySet set;
  set.dim = measures.front().dim();
  set.times = times;
  for (const auto& mu : mus) {
    set.input_masses.push_back(total_mass(mu));
  }

  std::vector<TransportPlan> plans;
  for (std::size_t k = 0; k + 1 < n_knots; ++k) {
    TransportPlan raw = solve_entropic(mus[k], mus[k + 1], config.solver);
    SegmentDiagnostics diag;
    diag.epsilon = raw.epsilon;
    diag.objective = raw.objective;
    diag.distance = std::sqrt(std::max(0.0, raw.objective));
    diag.plan_mass = raw.mass();
    diag.iterations = raw.iterations;
    diag.residual = raw.residual;
    diag.converged = raw.converged;
    set.segments.push_back(diag);
    plans.push_back(normalized(std::move(raw)));
  }

  const bool by_sigma = config.mass_rule == MassRule::kSigma;
  const DensityRatio first_ratio = density_ratio(plans.front(), mus.front(), Side::kSource);
  const Vector first_marginal = plans.front().source_marginal();

  auto ratio_at = [&](std::size_t k, const Vector& x) {
    if (!by_sigma) {
      return smoothed_point_mass(mus[k], plans[std::min(k, plans.size() - 1)].epsilon, x);
    }
    const bool has_forward = k + 1 < n_knots;
    const bool has_backward = k > 0;
    auto forward = [&] { return density_ratio_at(plans[k], mus[k], mus[k + 1], Side::kSource, x); };
    auto backward = [&] {
      return density_ratio_at(plans[k - 1], mus[k - 1], mus[k], Side::kTarget, x);
    };
    if (!has_backward) {
      return forward();
    }
    if (!has_forward) {
      return backward();
    }
    switch (config.marginal_rule) {
      case MarginalRule::kForward:
        return forward();
      case MarginalRule::kBackward:
        return backward();
      case MarginalRule::kAverage: {
        const double a = forward();
        const double b = backward();
        return (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
      }
    }
    return forward();
  };

  const DiscreteMeasure& mu0 = mus.front();
  for (Index i = 0; i < mu0.size(); ++i) {
    const double start_mass = mu0.weight(i);
    auto vanish = [&] {
      set.vanished_mass += start_mass;
      ++set.vanished_count;
    };
    if (!(first_marginal[i] > 0.0)) {
      vanish();
      continue;
    }
    ParticleTrajectory traj;
    traj.source = i;
    traj.positions.push_back(mu0.point(i));
    double sigma0 = by_sigma ? first_ratio.values[i] : start_mass;
    traj.weight = by_sigma ? first_marginal[i] : 1.0;
    traj.masses.push_back(std::sqrt(sigma0));
    bool alive = sigma0 > 0.0;
    for (std::size_t k = 1; alive && k < n_knots; ++k) {
      try {
        traj.positions.push_back(map_extend(plans[k - 1], mus[k], traj.positions.back()));
      } catch (const ZeroWeightError&) {
        alive = false;
        break;
      }
      const double sigma = ratio_at(k, traj.positions.back());
      if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        alive = false;
        break;
      }
      traj.masses.push_back(std::sqrt(sigma));
    }
    if (!alive) {
      vanish();
      continue;
    }
    set.particles.push_back(std::move(traj));
  }
  return set;
}

void estimate_knot_velocities(ParticleTrajectory& traj, const std::vector<double>& times) {
  const auto n = static_cast<Index>(times.size());
  if (static_cast<Index>(traj.positions.size()) != n || static_cast<Index>(traj.masses.size()) != n) {
    throw DimensionMismatchError("estimate_knot_velocities: knot data does not match the times");
  }
  const Index d = traj.positions.front().size();
  Matrix pos(n, d);
  Matrix mass(n, 1);
  for (Index k = 0; k < n; ++k) {
    pos.row(k) = traj.positions[static_cast<std::size_t>(k)].transpose();
    mass(k, 0) = traj.masses[static_cast<std::size_t>(k)];
  }
  const CubicFit pos_fit = natural_cubic_fit({times, pos});
  const CubicFit mass_fit = natural_cubic_fit({times, mass});
  traj.velocities.clear();
  for (Index k = 0; k < n; ++k) {
    traj.velocities.push_back({pos_fit.velocities.row(k).transpose(), mass_fit.velocities(k, 0)});
  }
}

void assemble_spline(TrajectorySet& set, const RescaleOptions& options) {
  std::vector<std::vector<Knot>> knots;
  knots.reserve(set.particles.size());
  for (const auto& traj : set.particles) {
    if (traj.velocities.size() != set.times.size()) {
      throw std::invalid_argument("assemble_spline: knot velocities missing");
    }
    std::vector<Knot> row;
    for (std::size_t k = 0; k < set.times.size(); ++k) {
      row.push_back({set.times[k], ConePoint(traj.positions[k], traj.masses[k]), traj.velocities[k]});
    }
    knots.push_back(std::move(row));
  }
  if (knots.empty()) {
    set.space_scale = options.space_scale.value_or(1.0);
    set.time_scale = options.time_scale.value_or(1.0);
    set.clamped_rates = 0;
    return;
  }
  const RescaleResult scaled = feasible_rescale(knots, options);
  set.space_scale = scaled.space_scale;
  set.time_scale = scaled.time_scale;
  set.clamped_rates = scaled.clamped_rates;
  for (std::size_t p = 0; p < set.particles.size(); ++p) {
    auto& traj = set.particles[p];
    const auto& row = scaled.trajectories[p];
    traj.segments.clear();
    for (std::size_t k = 0; k < row.size(); ++k) {
      // Clamped mass rates, back in the physical clock.
      traj.velocities[k].s = row[k].velocity.s * scaled.time_scale;
    }
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      traj.segments.push_back(control_points(row[k].point, row[k + 1].point, row[k].velocity,
                                             row[k + 1].velocity, row[k + 1].time - row[k].time));
    }
  }
}

TrajectorySet transport_spline(const std::vector<DiscreteMeasure>& measures,
                               const std::vector<double>& times, const PipelineConfig& config) {
  TrajectorySet set = build_trajectories(measures, times, config);
  for (auto& traj : set.particles) {
    estimate_knot_velocities(traj, set.times);
  }
  assemble_spline(set, config.rescale);
  return set;
}

DiscreteMeasure knot_measure(const TrajectorySet& set, std::size_t k) {
  if (k >= set.times.size()) {
    throw std::out_of_range("knot_measure: knot index out of range");
  }
  const auto n = static_cast<Index>(set.particles.size());
  Matrix pts(n, set.dim);
  Vector w(n);
  for (Index p = 0; p < n; ++p) {
    const auto& traj = set.particles[static_cast<std::size_t>(p)];
    pts.row(p) = traj.positions[k].transpose();
    w[p] = traj.weight * traj.masses[k] * traj.masses[k];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

MeasureCurve sample_curve(const TrajectorySet& set, int samples_per_segment) {
  if (samples_per_segment < 1) {
    throw std::invalid_argument("sample_curve: need at least one sample per segment");
  }
  for (const auto& traj : set.particles) {
    if (traj.segments.size() + 1 != set.times.size()) {
      throw std::invalid_argument("sample_curve: trajectories are not assembled");
    }
  }
  MeasureCurve curve;
  const auto n = static_cast<Index>(set.particles.size());
  const double inv_scale = 1.0 / set.space_scale;
  for (std::size_t k = 0; k + 1 < set.times.size(); ++k) {
    const double t0 = set.times[k];
    const double span = set.times[k + 1] - t0;
    for (int j = 0; j < samples_per_segment; ++j) {
      if (j == 0) {
        curve.knot_samples.push_back(curve.times.size());
        curve.times.push_back(t0);
        curve.measures.push_back(knot_measure(set, k));
        continue;
      }
      const double u = static_cast<double>(j) / samples_per_segment;
      Matrix pts(n, set.dim);
      Vector w(n);
      for (Index p = 0; p < n; ++p) {
        const auto& traj = set.particles[static_cast<std::size_t>(p)];
        const ConePoint z = decasteljau_eval(traj.segments[k], u);
        pts.row(p) = (z.x() * inv_scale).transpose();
        w[p] = traj.weight * z.r() * z.r();
      }
      curve.times.push_back(t0 + u * span);
      curve.measures.emplace_back(std::move(pts), std::move(w));
    }
  }
  curve.knot_samples.push_back(curve.times.size());
  curve.times.push_back(set.times.back());
  curve.measures.push_back(knot_measure(set, set.times.size() - 1));
  return curve;
}

CurvatureReport curve_curvature_report(const TrajectorySet& set, int steps, double h) {
  CurvatureReport report;
  const std::size_t n_knots = set.times.size();
  const double span = (set.times.back() - set.times.front()) * set.time_scale;
  std::vector<double> breaks(n_knots);
  for (std::size_t k = 0; k < n_knots; ++k) {
    breaks[k] = (set.times[k] - set.times.front()) / (set.times.back() - set.times.front());
  }
  breaks.front() = 0.0;
  breaks.back() = 1.0;
  for (const auto& traj : set.particles) {
    if (traj.segments.size() + 1 != n_knots) {
      throw std::invalid_argument("curve_curvature_report: trajectories are not assembled");
    }
    const auto* segments = &traj.segments;
    auto sampler = [segments, &breaks](double s) {
      auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
      std::size_t k = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
      k = std::min(k, segments->size() - 1);
      const double u = std::clamp((s - breaks[k]) / (breaks[k + 1] - breaks[k]), 0.0, 1.0);
      return decasteljau_eval((*segments)[k], u);
    };
    // The path runs on s in [0, 1]; dividing by span^3 returns to the
    // scaled clock.
    const double cost = path_curvature_cost(ConePath(sampler, breaks), steps, h) /
                        (span * span * span);
    report.per_particle.push_back(traj.weight * cost);
    report.total += traj.weight * cost;
  }
  return report;
}

}  // namespace wfr
