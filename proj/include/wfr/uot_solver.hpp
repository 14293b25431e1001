#pragma once

// Entropic solver for the static Wasserstein-Fisher-Rao problem
//
//   min_eta KL(eta_0 | mu_0) + KL(eta_1 | mu_1) + <c, eta>,
//   c(x, y) = -2 log cos(|x - y| ^ pi/2),
//
// regularized by eps * KL(eta | mu_0 x mu_1) and solved by alternating
// multiplicative marginal scalings.

#include <vector>

#include "wfr/discrete_measure.hpp"

namespace wfr {

/// Cost matrix with +infinity wherever |x - y| >= pi/2.
struct CostMatrix {
  Matrix entries;

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

double transport_cost(const Vector& x, const Vector& y);

CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target);

struct SolverConfig {
  /// Values <= 0 select default_epsilon() of the two measures.
  double epsilon = 0.0;
  int max_iters = 10000;
  /// Stop once the sup-norm change of the log scalings falls below this.
  double tol = 1e-9;
  /// Scalings are absorbed into the kernel once |log u| exceeds this.
  double absorb_threshold = 50.0;
  /// After each sweep, shift the potentials by (f + c, g - c) with c the exact
  /// dual maximizer, one c per connected block of the plan support. Removes
  /// the slow translation modes of the iteration without changing its fixed
  /// point.
  bool translate = true;
  /// Keep the unregularized objective and the dual value of every iterate.
  bool record_objective = false;
};

/// 1e-3 * (diameter of the joint positive-weight support)^2, or 1e-3 for a
/// single location.
double default_epsilon(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1);

struct TransportPlan {
  /// eta[i][j] divided by `normalization`.
  Matrix coupling;
  /// log of the full scalings U, V with eta = diag(U mu0) K diag(mu1 V),
  /// K = exp(-c / eps). Rows or columns with no reachable mass hold +inf.
  Vector source_log_scaling;
  Vector target_log_scaling;
  double epsilon = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  /// KL(eta_0|mu_0) + KL(eta_1|mu_1) + <c, eta> of the raw coupling.
  double objective = 0.0;
  /// objective + eps * KL(eta | mu_0 x mu_1).
  double regularized_objective = 0.0;
  double normalization = 1.0;
  std::vector<double> objective_trace;
  /// Dual of the regularized problem; exact block ascent never decreases it.
  std::vector<double> dual_trace;

  double mass() const { return coupling.sum(); }
  Vector source_marginal() const { return coupling.rowwise().sum(); }
  Vector target_marginal() const { return coupling.colwise().sum().transpose(); }
};

/// Throws EmptySupportError when either measure has zero total mass and
/// std::invalid_argument for a non-finite epsilon. Hitting max_iters is not an
/// error; the plan reports converged = false with the final residual.
TransportPlan solve_entropic(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                             const SolverConfig& config = {});

/// The coupling rescaled to unit mass.
TransportPlan normalized(TransportPlan plan);

/// Unregularized primal objective of the (denormalized) coupling.
double primal_objective(const Matrix& coupling, const DiscreteMeasure& mu0,
                        const DiscreteMeasure& mu1);

/// Square root of the unregularized objective of the plan.
double wfr_distance(const TransportPlan& plan, const DiscreteMeasure& mu0,
                    const DiscreteMeasure& mu1);

/// T(x_i) = sum_j eta_ij y_j / sum_j eta_ij, one row per source point.
/// Throws DanglingSourceError on a row without mass.
Matrix barycentric_map(const TransportPlan& plan, const DiscreteMeasure& target);

/// Entropic conditional mean of the target at an arbitrary query point.
/// Throws ZeroWeightError when no target lies within pi/2 of the query.
Vector map_extend(const TransportPlan& plan, const DiscreteMeasure& target, const Vector& query);

enum class Side { kSource, kTarget };

struct DensityRatio {
  Vector values;
  /// Support points with positive mass and no coupling mass.
  std::vector<Index> singular;
};

/// sigma = d mu / d eta_side at the support points of mu.
DensityRatio density_ratio(const TransportPlan& plan, const DiscreteMeasure& mu, Side side);

/// sigma at an arbitrary point, using the entropic extension of the plan
/// marginal: 1 / (U(q) S(q)) with S(q) the kernel sum against the opposite
/// side and U(q) its scaling update. Agrees with density_ratio on the support.
/// Returns 0 where no mass is reachable.
double density_ratio_at(const TransportPlan& plan, const DiscreteMeasure& source,
                        const DiscreteMeasure& target, Side side, const Vector& query);

}  // namespace wfr
