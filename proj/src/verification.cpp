#include "wfr/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

namespace {

constexpr double kSelfCheckTol = 1e-6;
constexpr double kSelfCheckStep = 1e-5;

std::vector<std::pair<Vector, double>> box_samples(Index dim, double radius, double t_max,
                                                   int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.1, 0.9);
  std::vector<std::pair<Vector, double>> out;
  const double side = 0.9 * radius / std::sqrt(static_cast<double>(dim));
  for (int k = 0; k < count; ++k) {
    Vector x(dim);
    for (Index i = 0; i < dim; ++i) {
      x[i] = side * coord(rng);
    }
    out.emplace_back(std::move(x), time(rng) * t_max);
  }
  return out;
}

bool close(double analytic, double numeric) {
  return std::abs(analytic - numeric) <= kSelfCheckTol * std::max(1.0, std::abs(analytic));
}

struct FlowState {
  Vector x;
  double r;
};

FlowState rk4_step(const SmoothField& field, const FlowState& s, double t, double dt) {
  auto rate_x = [&](const Vector& x, double tt) { return field.v(x, tt); };
  auto rate_r = [&](const Vector& x, double r, double tt) { return 2.0 * field.alpha(x, tt) * r; };
  const Vector k1x = rate_x(s.x, t);
  const double k1r = rate_r(s.x, s.r, t);
  const Vector x2 = s.x + 0.5 * dt * k1x;
  const double r2 = s.r + 0.5 * dt * k1r;
  const Vector k2x = rate_x(x2, t + 0.5 * dt);
  const double k2r = rate_r(x2, r2, t + 0.5 * dt);
  const Vector x3 = s.x + 0.5 * dt * k2x;
  const double r3 = s.r + 0.5 * dt * k2r;
  const Vector k3x = rate_x(x3, t + 0.5 * dt);
  const double k3r = rate_r(x3, r3, t + 0.5 * dt);
  const Vector x4 = s.x + dt * k3x;
  const double r4 = s.r + dt * k3r;
  const Vector k4x = rate_x(x4, t + dt);
  const double k4r = rate_r(x4, r4, t + dt);
  return {s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
          s.r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)};
}

void require_inside(const SmoothField& field, const FlowState& s, double t) {
  if (!s.x.allFinite() || !field.inside(s.x, t) || !(s.r > 0.0) || !std::isfinite(s.r)) {
    throw BlowUpError("integrate_flow: particle left the field box at t = " + std::to_string(t));
  }
}

std::vector<FlowState> integrate_states(const SmoothField& field, FlowState state,
                                        const std::vector<double>& times, int substeps) {
  std::vector<FlowState> out{state};
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dt = (times[k + 1] - times[k]) / substeps;
    for (int j = 0; j < substeps; ++j) {
      state = rk4_step(field, state, times[k] + j * dt, dt);
      require_inside(field, state, times[k] + (j + 1) * dt);
    }
    out.push_back(state);
  }
  return out;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

SmoothField::SmoothField(FieldSpec spec) : spec_(std::move(spec)) {
  if (spec_.dim < 1 || !(spec_.box_radius > 0.0) || !(spec_.t_max > 0.0)) {
    throw std::invalid_argument("SmoothField: need dim >= 1 and a nonempty box");
  }
  if (!spec_.velocity || !spec_.growth || !spec_.velocity_dt || !spec_.velocity_jacobian ||
      !spec_.growth_dt || !spec_.growth_gradient) {
    throw std::invalid_argument("SmoothField: every evaluator must be set");
  }
  const double h = kSelfCheckStep;
  for (const auto& [x, t] : box_samples(spec_.dim, spec_.box_radius, spec_.t_max, 8, 12345)) {
    const Vector dv_dt = (v(x, t + h) - v(x, t - h)) / (2.0 * h);
    const Vector dv_dt_exact = spec_.velocity_dt(x, t);
    const double da_dt = (alpha(x, t + h) - alpha(x, t - h)) / (2.0 * h);
    bool ok = close(spec_.growth_dt(x, t), da_dt);
    const Matrix jac = spec_.velocity_jacobian(x, t);
    const Vector grad = spec_.growth_gradient(x, t);
    ok = ok && jac.rows() == spec_.dim && jac.cols() == spec_.dim && grad.size() == spec_.dim;
    for (Index i = 0; ok && i < spec_.dim; ++i) {
      ok = close(dv_dt_exact[i], dv_dt[i]);
      Vector e = Vector::Zero(spec_.dim);
      e[i] = h;
      const Vector col = (v(x + e, t) - v(x - e, t)) / (2.0 * h);
      for (Index j = 0; ok && j < spec_.dim; ++j) {
        ok = close(jac(j, i), col[j]);
      }
      ok = ok && close(grad[i], (alpha(x + e, t) - alpha(x - e, t)) / (2.0 * h));
    }
    if (!ok) {
      throw std::invalid_argument("SmoothField '" + spec_.name +
                                  "': analytic derivatives disagree with finite differences");
    }
  }
}

bool SmoothField::inside(const Vector& x, double t) const {
  return x.size() == spec_.dim && x.norm() <= spec_.box_radius && t >= 0.0 && t <= spec_.t_max;
}

double SmoothField::gradient_defect() const {
  double worst = 0.0;
  for (const auto& [x, t] : box_samples(spec_.dim, spec_.box_radius, spec_.t_max, 16, 777)) {
    worst = std::max(worst, (v(x, t) - spec_.growth_gradient(x, t)).norm());
  }
  return worst;
}

SmoothField constant_growth_field(Index dim, double rate, double box_radius) {
  FieldSpec s;
  s.name = "constant-growth";
  s.dim = dim;
  s.velocity = [dim](const Vector&, double) { return Vector::Zero(dim).eval(); };
  s.growth = [rate](const Vector&, double) { return rate; };
  s.velocity_dt = s.velocity;
  s.velocity_jacobian = [dim](const Vector&, double) { return Matrix::Zero(dim, dim).eval(); };
  s.growth_dt = [](const Vector&, double) { return 0.0; };
  s.growth_gradient = s.velocity;
  s.box_radius = box_radius;
  return SmoothField(std::move(s));
}

SmoothField linear_gradient_field(const Vector& slope, double offset, double box_radius) {
  const Index dim = slope.size();
  FieldSpec s;
  s.name = "linear-gradient";
  s.dim = dim;
  s.velocity = [slope](const Vector&, double) { return slope; };
  s.growth = [slope, offset](const Vector& x, double) { return offset + slope.dot(x); };
  s.velocity_dt = [dim](const Vector&, double) { return Vector::Zero(dim).eval(); };
  s.velocity_jacobian = [dim](const Vector&, double) { return Matrix::Zero(dim, dim).eval(); };
  s.growth_dt = [](const Vector&, double) { return 0.0; };
  s.growth_gradient = s.velocity;
  s.box_radius = box_radius;
  return SmoothField(std::move(s));
}

SmoothField quadratic_gradient_field(const Matrix& hessian, double offset, double box_radius) {
  const Index dim = hessian.rows();
  if (hessian.cols() != dim || !hessian.isApprox(hessian.transpose(), 0.0)) {
    throw std::invalid_argument("quadratic_gradient_field: Hessian must be square and symmetric");
  }
  FieldSpec s;
  s.name = "quadratic-gradient";
  s.dim = dim;
  s.velocity = [hessian](const Vector& x, double) { return (hessian * x).eval(); };
  s.growth = [hessian, offset](const Vector& x, double) {
    return offset + 0.5 * x.dot(hessian * x);
  };
  s.velocity_dt = [dim](const Vector&, double) { return Vector::Zero(dim).eval(); };
  s.velocity_jacobian = [hessian](const Vector&, double) { return hessian; };
  s.growth_dt = [](const Vector&, double) { return 0.0; };
  s.growth_gradient = s.velocity;
  s.box_radius = box_radius;
  return SmoothField(std::move(s));
}

SmoothField constant_velocity_field(const Vector& drift, double box_radius) {
  const Index dim = drift.size();
  FieldSpec s;
  s.name = "constant-velocity";
  s.dim = dim;
  s.velocity = [drift](const Vector&, double) { return drift; };
  s.growth = [](const Vector&, double) { return 0.0; };
  s.velocity_dt = [dim](const Vector&, double) { return Vector::Zero(dim).eval(); };
  s.velocity_jacobian = [dim](const Vector&, double) { return Matrix::Zero(dim, dim).eval(); };
  s.growth_dt = [](const Vector&, double) { return 0.0; };
  s.growth_gradient = s.velocity_dt;
  s.box_radius = box_radius;
  return SmoothField(std::move(s));
}

SmoothField drift_with_linear_growth_field(const Vector& drift, const Vector& slope,
                                           double box_radius) {
  const Index dim = drift.size();
  if (slope.size() != dim) {
    throw DimensionMismatchError("drift_with_linear_growth_field: dimension mismatch");
  }
  FieldSpec s;
  s.name = "drift-linear-growth";
  s.dim = dim;
  s.velocity = [drift](const Vector&, double) { return drift; };
  s.growth = [slope](const Vector& x, double) { return slope.dot(x); };
  s.velocity_dt = [dim](const Vector&, double) { return Vector::Zero(dim).eval(); };
  s.velocity_jacobian = [dim](const Vector&, double) { return Matrix::Zero(dim, dim).eval(); };
  s.growth_dt = [](const Vector&, double) { return 0.0; };
  s.growth_gradient = [slope](const Vector&, double) { return slope; };
  s.box_radius = box_radius;
  return SmoothField(std::move(s));
}

FlowTrajectory::FlowTrajectory(const SmoothField& field, std::vector<double> times,
                               std::vector<Vector> positions, std::vector<double> masses,
                               double error_estimate)
    : field_(&field),
      times_(std::move(times)),
      positions_(std::move(positions)),
      masses_(std::move(masses)),
      error_estimate_(error_estimate) {
  if (times_.empty() || positions_.size() != times_.size() || masses_.size() != times_.size()) {
    throw std::invalid_argument("FlowTrajectory: grid and states disagree");
  }
}

ConePoint FlowTrajectory::at(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    throw std::out_of_range("FlowTrajectory: t outside the integration grid");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double dt = t - times_[k];
  if (dt == 0.0) {
    return {positions_[k], masses_[k]};
  }
  const FlowState s = rk4_step(*field_, {positions_[k], masses_[k]}, times_[k], dt);
  return {s.x, s.r};
}

ConePath FlowTrajectory::path() const {
  const double t0 = times_.front();
  const double span = times_.back() - t0;
  return ConePath([this, t0, span](double s) {
    return at(s == 1.0 ? times_.back() : t0 + s * span);
  });
}

FlowTrajectory integrate_flow(const SmoothField& field, const Vector& x0, double r0,
                              const std::vector<double>& times) {
  if (times.empty()) {
    throw std::invalid_argument("integrate_flow: empty time grid");
  }
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k])) {
      throw NonMonotoneTimesError("integrate_flow: time grid must increase strictly");
    }
  }
  if (x0.size() != field.dim()) {
    throw DimensionMismatchError("integrate_flow: start point dimension differs from the field");
  }
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw std::invalid_argument("integrate_flow: initial mass must be positive");
  }
  if (!field.inside(x0, times.front()) || times.back() > field.spec().t_max) {
    throw std::invalid_argument("integrate_flow: start or grid outside the field box");
  }
  const auto coarse = integrate_states(field, {x0, r0}, times, 1);
  const auto fine = integrate_states(field, {x0, r0}, times, 2);
  std::vector<Vector> xs;
  std::vector<double> rs;
  double err = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    xs.push_back(coarse[k].x);
    rs.push_back(coarse[k].r);
    err = std::max(err, (coarse[k].x - fine[k].x).norm() + std::abs(coarse[k].r - fine[k].r));
  }
  return FlowTrajectory(field, times, std::move(xs), std::move(rs), err);
}

std::vector<double> uniform_times(double t0, double t1, int steps) {
  if (steps < 1 || !(t1 > t0)) {
    throw std::invalid_argument("uniform_times: need steps >= 1 and t1 > t0");
  }
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    out[static_cast<std::size_t>(k)] = k == steps ? t1 : t0 + (t1 - t0) * k / steps;
  }
  return out;
}

double flow_error(const SmoothField& field, const Vector& x0, double r0, int steps,
                  const std::function<ConePoint(double)>& exact) {
  const FlowTrajectory flow = integrate_flow(field, x0, r0, uniform_times(0.0, 1.0, steps));
  double err = 0.0;
  for (std::size_t k = 0; k < flow.times().size(); ++k) {
    const ConePoint z = exact(flow.times()[k]);
    err = std::max(err, (flow.positions()[k] - z.x()).norm() + std::abs(flow.masses()[k] - z.r()));
  }
  return err;
}

double e_cost_integrand(const SmoothField& field, const Vector& x, double t) {
  const FieldSpec& s = field.spec();
  const Vector v = s.velocity(x, t);
  const double a = s.growth(x, t);
  const Vector transport = s.velocity_dt(x, t) + s.velocity_jacobian(x, t) * v + 4.0 * a * v;
  const double growth =
      s.growth_dt(x, t) + 0.5 * s.growth_gradient(x, t).dot(v) + 2.0 * a * a;
  return transport.squaredNorm() + 4.0 * growth * growth;
}

double check_pointwise_identity(const SmoothField& field, int samples, std::uint64_t seed,
                                double h) {
  if (samples < 1) {
    throw std::invalid_argument("check_pointwise_identity: need at least one sample");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> mass(0.5, 2.0);
  std::uniform_real_distribution<double> time(0.1, 0.9);
  const double side = 0.25 * field.spec().box_radius / std::sqrt(static_cast<double>(field.dim()));
  const auto grid = uniform_times(0.0, 1.0, 200);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vector x0(field.dim());
    for (Index i = 0; i < x0.size(); ++i) {
      x0[i] = side * coord(rng);
    }
    const double r0 = mass(rng);
    const double t = time(rng);
    const FlowTrajectory flow = integrate_flow(field, x0, r0, grid);
    const ConePath path = flow.path();
    const ConePoint z = path(t);
    const double p_side = cone_norm_squared(z, covariant_acceleration(path, t, h));
    const double e_side = z.r() * z.r() * e_cost_integrand(field, z.x(), t);
    worst = std::max(worst, relative_gap(p_side, e_side));
  }
  return worst;
}

CostComparison check_e_equals_p(const SmoothField& field, const DiscreteMeasure& mu0, int steps,
                                double h) {
  const double defect = field.gradient_defect();
  if (defect > 1e-10) {
    throw GradientMismatchError("check_e_equals_p: field '" + field.name() +
                                "' is not a gradient field, |v - grad alpha| = " +
                                std::to_string(defect));
  }
  if (mu0.dim() != field.dim()) {
    throw DimensionMismatchError("check_e_equals_p: measure dimension differs from the field");
  }
  const auto grid = uniform_times(0.0, 1.0, steps);
  const double dt = 1.0 / steps;
  CostComparison out;
  for (Index i = 0; i < mu0.size(); ++i) {
    if (!(mu0.weight(i) > 0.0)) {
      continue;
    }
    const FlowTrajectory flow = integrate_flow(field, mu0.point(i), 1.0, grid);
    double e_side = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double r = flow.masses()[k];
      const double value = r * r * e_cost_integrand(field, flow.positions()[k], grid[k]);
      e_side += (k == 0 || k + 1 == grid.size()) ? 0.5 * value : value;
    }
    out.e_cost += mu0.weight(i) * e_side * dt;
    out.p_cost += mu0.weight(i) * path_curvature_cost(flow.path(), steps, h);
  }
  out.gap = relative_gap(out.e_cost, out.p_cost);
  return out;
}

double check_wfr_geodesic_hj(const ConePoint& z0, const ConePoint& z1, int samples, double h) {
  if (samples < 1) {
    throw std::invalid_argument("check_wfr_geodesic_hj: need at least one sample");
  }
  // Validates the pair up front.
  geodesic_eval(z0, z1, 0.5);
  if (z0 == z1) {
    return 0.0;
  }
  const ConePath path([&](double t) { return geodesic_eval(z0, z1, t); });
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = h + (1.0 - 2.0 * h) * (k + 0.5) / samples;
    const ConePoint z = path(t);
    worst = std::max(worst, std::sqrt(cone_norm_squared(z, covariant_acceleration(path, t, h))));
  }
  return worst;
}

namespace {

struct SuiteCheck {
  std::string name;
  double threshold;
  bool lower_bound;
  std::function<double(std::uint64_t)> run;
};

ConePoint random_cone_point(std::mt19937_64& rng, Index dim, double spread) {
  std::uniform_real_distribution<double> coord(-spread, spread);
  std::uniform_real_distribution<double> mass(0.2, 3.0);
  Vector x(dim);
  for (Index i = 0; i < dim; ++i) {
    x[i] = coord(rng);
  }
  return {x, mass(rng)};
}

DiscreteMeasure random_measure(std::mt19937_64& rng, Index dim, Index n, double spread) {
  std::uniform_real_distribution<double> coord(-spread, spread);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  Matrix pts(n, dim);
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < dim; ++k) {
      pts(i, k) = coord(rng);
    }
    w[i] = weight(rng) / static_cast<double>(n);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

std::vector<SmoothField> gradient_families() {
  Vector slope(2);
  slope << 0.3, -0.2;
  Matrix hessian(2, 2);
  hessian << 0.4, 0.1, 0.1, -0.3;
  std::vector<SmoothField> out;
  out.push_back(constant_growth_field(2, 0.5));
  out.push_back(linear_gradient_field(slope, 0.2));
  out.push_back(quadratic_gradient_field(hessian, 0.25));
  return out;
}

std::vector<SuiteCheck> suite_checks() {
  std::vector<SuiteCheck> checks;
  checks.push_back({"geodesic-autoparallel", 1e-4, false, [](std::uint64_t seed) {
                      std::mt19937_64 rng(seed);
                      double worst = 0.0;
                      for (int k = 0; k < 100; ++k) {
                        const ConePoint z0 = random_cone_point(rng, 2, 0.5);
                        ConePoint z1 = random_cone_point(rng, 2, 0.5);
                        worst = std::max(worst, check_wfr_geodesic_hj(z0, z1, 10));
                      }
                      return worst;
                    }});
  for (std::size_t f = 0; f < 3; ++f) {
    const std::string family = gradient_families()[f].name();
    checks.push_back({"pointwise-identity/" + family, 1e-3, false, [f](std::uint64_t seed) {
                        const auto fields = gradient_families();
                        return check_pointwise_identity(fields[f], 100, seed);
                      }});
  }
  for (std::size_t f = 0; f < 3; ++f) {
    const std::string family = gradient_families()[f].name();
    checks.push_back({"e-equals-p/" + family + "/1000", 1e-3, false, [f](std::uint64_t seed) {
                        std::mt19937_64 rng(seed);
                        const auto fields = gradient_families();
                        return check_e_equals_p(fields[f], random_measure(rng, 2, 20, 0.5), 1000)
                            .gap;
                      }});
    checks.push_back({"e-equals-p/" + family + "/10000", 1e-5, false, [f](std::uint64_t seed) {
                        std::mt19937_64 rng(seed);
                        const auto fields = gradient_families();
                        return check_e_equals_p(fields[f], random_measure(rng, 2, 20, 0.5), 10000)
                            .gap;
                      }});
  }
  checks.push_back({"e-equals-p/analytic", 1e-6, false, [](std::uint64_t seed) {
                      std::mt19937_64 rng(seed);
                      const double b = 0.5;
                      const SmoothField field = constant_growth_field(2, b);
                      const DiscreteMeasure mu0 = random_measure(rng, 2, 20, 0.5);
                      const double m0 = total_mass(mu0);
                      const double exact =
                          16.0 * std::pow(b, 4) * m0 * std::expm1(4.0 * b) / (4.0 * b);
                      const CostComparison c = check_e_equals_p(field, mu0, 10000);
                      return std::max(relative_gap(c.e_cost, exact), relative_gap(c.p_cost, exact));
                    }});
  checks.push_back({"flow-order/constant-growth", 12.0, true, [](std::uint64_t) {
                      const double b = 1.0;
                      Vector x0(1);
                      x0 << 0.3;
                      const SmoothField field = constant_growth_field(1, b);
                      auto exact = [&](double t) { return ConePoint(x0, std::exp(2.0 * b * t)); };
                      return flow_error(field, x0, 1.0, 10, exact) /
                             flow_error(field, x0, 1.0, 20, exact);
                    }});
  checks.push_back({"flow-order/drift-linear-growth", 12.0, true, [](std::uint64_t) {
                      Vector drift(2);
                      drift << 0.6, -0.4;
                      Vector slope(2);
                      slope << 0.8, 0.5;
                      Vector x0(2);
                      x0 << 0.2, 0.1;
                      const SmoothField field = drift_with_linear_growth_field(drift, slope);
                      auto exact = [&](double t) {
                        return ConePoint(x0 + t * drift,
                                         std::exp(2.0 * slope.dot(x0) * t + slope.dot(drift) * t * t));
                      };
                      return flow_error(field, x0, 1.0, 10, exact) /
                             flow_error(field, x0, 1.0, 20, exact);
                    }});
  return checks;
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const std::string& filter, std::uint64_t seed,
                                                double tolerance) {
  std::vector<CheckResult> results;
  for (const auto& check : suite_checks()) {
    if (!filter.empty() && check.name.find(filter) == std::string::npos) {
      continue;
    }
    CheckResult r;
    r.name = check.name;
    r.lower_bound = check.lower_bound;
    r.threshold = (!check.lower_bound && tolerance > 0.0) ? tolerance : check.threshold;
    r.observed = check.run(seed);
    r.pass = check.lower_bound ? r.observed >= r.threshold : r.observed <= r.threshold;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace wfr
