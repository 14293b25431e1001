#pragma once

// Numerical checks of the cone and WFR differential identities on smooth
// velocity / growth fields: flow maps, the pointwise covariant identity, the
// E-cost = P-cost equality and the autoparallel property of cone geodesics.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wfr/discrete_measure.hpp"

namespace wfr {

/// Velocity v_t(x) and growth rate alpha_t(x) with analytic derivatives,
/// valid for |x| <= box_radius and t in [0, t_max].
struct FieldSpec {
  std::string name;
  Index dim = 1;
  std::function<Vector(const Vector&, double)> velocity;
  std::function<double(const Vector&, double)> growth;
  std::function<Vector(const Vector&, double)> velocity_dt;
  /// Jacobian, entry (i, j) = d v_i / d x_j.
  std::function<Matrix(const Vector&, double)> velocity_jacobian;
  std::function<double(const Vector&, double)> growth_dt;
  std::function<Vector(const Vector&, double)> growth_gradient;
  double box_radius = 1.0;
  double t_max = 1.0;
};

class SmoothField {
 public:
  /// Checks the analytic derivatives against central differences at sample
  /// points of the box and throws std::invalid_argument on a relative
  /// mismatch above 1e-6.
  explicit SmoothField(FieldSpec spec);

  const FieldSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  Index dim() const { return spec_.dim; }
  bool inside(const Vector& x, double t) const;

  Vector v(const Vector& x, double t) const { return spec_.velocity(x, t); }
  double alpha(const Vector& x, double t) const { return spec_.growth(x, t); }

  /// Largest |v - grad alpha| over sample points of the box.
  double gradient_defect() const;

 private:
  FieldSpec spec_;
};

SmoothField constant_growth_field(Index dim, double rate, double box_radius = 2.0);
/// alpha = offset + <slope, x>, v = slope.
SmoothField linear_gradient_field(const Vector& slope, double offset, double box_radius = 2.0);
/// alpha = offset + x^T A x / 2, v = A x, A symmetric.
SmoothField quadratic_gradient_field(const Matrix& hessian, double offset,
                                     double box_radius = 2.0);
/// v = drift, alpha = 0.
SmoothField constant_velocity_field(const Vector& drift, double box_radius = 2.0);
/// v = drift, alpha = <slope, x>; not a gradient field unless drift = slope.
SmoothField drift_with_linear_growth_field(const Vector& drift, const Vector& slope,
                                           double box_radius = 2.0);

/// Particle position X_t and mass R_t (initial mass included) on a grid.
class FlowTrajectory {
 public:
  FlowTrajectory(const SmoothField& field, std::vector<double> times,
                 std::vector<Vector> positions, std::vector<double> masses,
                 double error_estimate);

  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector>& positions() const { return positions_; }
  const std::vector<double>& masses() const { return masses_; }
  /// Max difference against the same integration with halved steps.
  double error_estimate() const { return error_estimate_; }

  /// Point at arbitrary t in [t_0, t_N]: one RK4 step from the preceding node.
  ConePoint at(double t) const;

  /// The flow as a cone path on s in [0, 1], t = t_0 + s (t_N - t_0).
  ConePath path() const;

 private:
  const SmoothField* field_;
  std::vector<double> times_;
  std::vector<Vector> positions_;
  std::vector<double> masses_;
  double error_estimate_ = 0.0;
};

/// Classical RK4 for X' = v(X, t), R' = 2 alpha(X, t) R with R(t_0) = r0.
/// The grid must increase strictly and stay in [0, t_max]; throws
/// BlowUpError once |X| leaves the box or R stops being finite and positive.
/// The field must outlive the returned trajectory.
FlowTrajectory integrate_flow(const SmoothField& field, const Vector& x0, double r0,
                              const std::vector<double>& times);

/// Max over the grid nodes of |X - X_exact| + |R - R_exact| for integration
/// over [0, 1] with `steps` intervals.
double flow_error(const SmoothField& field, const Vector& x0, double r0, int steps,
                  const std::function<ConePoint(double)>& exact);

/// Evenly spaced grid with `steps` intervals on [t0, t1].
std::vector<double> uniform_times(double t0, double t1, int steps);

/// |dv/dt + J v + 4 alpha v|^2 + 4 (d alpha/dt + grad alpha . v / 2 + 2 alpha^2)^2.
double e_cost_integrand(const SmoothField& field, const Vector& x, double t);

/// Max relative gap between |z''|^2 of integrated flows (finite differences)
/// and r^2 e_cost_integrand at random (x0, r0, t).
double check_pointwise_identity(const SmoothField& field, int samples, std::uint64_t seed,
                                double h = 1e-3);

struct CostComparison {
  double e_cost = 0.0;
  double p_cost = 0.0;
  double gap = 0.0;
};

/// Both sides by the trapezoid rule on the same grid of `steps` intervals of
/// [0, 1]. Throws GradientMismatchError unless v = grad alpha.
CostComparison check_e_equals_p(const SmoothField& field, const DiscreteMeasure& mu0, int steps,
                                double h = 1e-3);

/// Max cone norm of the covariant acceleration of the closed-form geodesic at
/// `samples` interior times.
double check_wfr_geodesic_hj(const ConePoint& z0, const ConePoint& z1, int samples,
                             double h = kDefaultStep);

struct CheckResult {
  std::string name;
  double threshold = 0.0;
  double observed = 0.0;
  /// Pass means observed >= threshold instead of observed <= threshold.
  bool lower_bound = false;
  bool pass = false;
};

/// Runs the checks whose name contains `filter` (all when empty). A positive
/// `tolerance` replaces the thresholds of the upper-bound checks.
std::vector<CheckResult> run_verification_suite(const std::string& filter = "",
                                                std::uint64_t seed = 0, double tolerance = 0.0);

}  // namespace wfr
