#pragma once

// Geometry of the cone over R^d: points are (position, mass) pairs with the
// slice r = 0 collapsed to a single vertex.

#include <Eigen/Core>

#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace wfr {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Default central-difference step for path derivatives.
inline constexpr double kDefaultStep = 1e-4;

/// Below this angle the geodesic local time uses its series form.
inline constexpr double kSeriesAngle = 1e-6;

class ConePoint {
 public:
  ConePoint() = default;

  /// Throws std::invalid_argument when r is negative or non-finite. A zero
  /// mass canonicalizes the position to the zero vector.
  ConePoint(Vector x, double r);

  const Vector& x() const { return x_; }
  double r() const { return r_; }
  Index dim() const { return x_.size(); }
  bool is_vertex() const { return r_ == 0.0; }

  friend bool operator==(const ConePoint& a, const ConePoint& b);

 private:
  Vector x_;
  double r_ = 0.0;
};

/// Velocity (v, p) = d/dt (x, r).
struct ConeTangent {
  Vector v;
  double p = 0.0;
};

/// A curve t in [0, 1] -> cone. Breaks split [0, 1] into pieces on which the
/// curve is C^2; derivatives are never differenced across a break.
class ConePath {
 public:
  using Sampler = std::function<ConePoint(double)>;

  explicit ConePath(Sampler sampler, std::vector<double> breaks = {0.0, 1.0});

  /// Throws std::out_of_range outside [0, 1].
  ConePoint operator()(double t) const;

  std::span<const double> breaks() const { return breaks_; }
  bool is_piecewise() const { return breaks_.size() > 2; }

 private:
  Sampler sampler_;
  std::vector<double> breaks_;
};

enum class Stencil {
  kCentral,         // fails when t +- h leaves [0, 1]
  kOneSidedAtEnds,  // second-order one-sided stencils near piece ends
};

double cone_distance(const ConePoint& a, const ConePoint& b);

/// Riemannian inner product <(v1,p1),(v2,p2)> = <v1,v2> r^2 + p1 p2 at `base`.
double cone_inner(const ConePoint& base, const ConeTangent& u, const ConeTangent& w);

double cone_norm_squared(const ConePoint& base, const ConeTangent& u);

/// Closed-form constant-speed geodesic z0 #_t z1.
///
/// Requires |x0 - x1| < pi/2 (GeodesicDomainError otherwise) and rejects a
/// vertex endpoint unless both positions coincide (VertexError). Coincident
/// positions give the pure mass branch x(t) = x0, r(t) linear.
ConePoint geodesic_eval(const ConePoint& z0, const ConePoint& z1, double t);

/// Covariant acceleration (x'' + 2 (r'/r) x', r'' - r |x'|^2) of the path at t,
/// with derivatives taken by second-order finite differences of step h.
ConeTangent covariant_acceleration(const ConePath& path, double t, double h = kDefaultStep,
                                   Stencil stencil = Stencil::kCentral);

/// Trapezoidal approximation of the integral over [0, 1] of the squared cone
/// norm of the covariant acceleration. Each C^2 piece is integrated separately
/// with about n_steps intervals per unit time (at least two).
double path_curvature_cost(const ConePath& path, int n_steps, double h = kDefaultStep);

}  // namespace wfr
