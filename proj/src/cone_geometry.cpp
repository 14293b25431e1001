#include "wfr/cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

ConePoint::ConePoint(Vector x, double r) : x_(std::move(x)), r_(r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("ConePoint: mass must be finite and nonnegative, got " +
                                std::to_string(r));
  }
  if (!x_.allFinite()) {
    throw std::invalid_argument("ConePoint: position must be finite");
  }
  if (r_ == 0.0) {
    x_.setZero();
  }
}

bool operator==(const ConePoint& a, const ConePoint& b) {
  if (a.is_vertex() && b.is_vertex()) {
    return true;
  }
  return a.r_ == b.r_ && a.x_.size() == b.x_.size() && a.x_ == b.x_;
}

ConePath::ConePath(Sampler sampler, std::vector<double> breaks)
    : sampler_(std::move(sampler)), breaks_(std::move(breaks)) {
  if (breaks_.size() < 2 || breaks_.front() != 0.0 || breaks_.back() != 1.0 ||
      !std::is_sorted(breaks_.begin(), breaks_.end()) ||
      std::adjacent_find(breaks_.begin(), breaks_.end()) != breaks_.end()) {
    throw std::invalid_argument("ConePath: breaks must increase strictly from 0 to 1");
  }
}

ConePoint ConePath::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("ConePath: t = " + std::to_string(t) + " outside [0, 1]");
  }
  return sampler_(t);
}

namespace {

void require_same_dim(const ConePoint& a, const ConePoint& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatchError("cone points of dimension " + std::to_string(a.dim()) +
                                 " and " + std::to_string(b.dim()));
  }
}

// sin(x) / x with its removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < kSeriesAngle) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

struct PathDerivatives {
  Vector x, dx, ddx;
  double r = 0.0, dr = 0.0, ddr = 0.0;
};

// Derivatives on the window [lo, hi]; central when the stencil fits, else a
// second-order one-sided stencil pointing into the window.
PathDerivatives differentiate(const ConePath& path, double t, double h, double lo, double hi) {
  PathDerivatives d;
  const ConePoint z0 = path(t);
  d.x = z0.x();
  d.r = z0.r();
  if (t - h >= lo && t + h <= hi) {
    const ConePoint zp = path(t + h);
    const ConePoint zm = path(t - h);
    d.dx = (zp.x() - zm.x()) / (2.0 * h);
    d.ddx = (zp.x() - 2.0 * z0.x() + zm.x()) / (h * h);
    d.dr = (zp.r() - zm.r()) / (2.0 * h);
    d.ddr = (zp.r() - 2.0 * z0.r() + zm.r()) / (h * h);
    return d;
  }
  const double dir = (t - lo < hi - t) ? 1.0 : -1.0;
  if ((dir > 0 && t + 3.0 * h > hi) || (dir < 0 && t - 3.0 * h < lo)) {
    throw StepError("one-sided stencil of step " + std::to_string(h) +
                    " does not fit the piece around t = " + std::to_string(t));
  }
  const ConePoint z1 = path(t + dir * h);
  const ConePoint z2 = path(t + 2.0 * dir * h);
  const ConePoint z3 = path(t + 3.0 * dir * h);
  // Written in consecutive differences so that constant paths give exact zeros.
  const Vector dx1 = z1.x() - z0.x(), dx2 = z2.x() - z1.x(), dx3 = z3.x() - z2.x();
  const double dr1 = z1.r() - z0.r(), dr2 = z2.r() - z1.r(), dr3 = z3.r() - z2.r();
  d.dx = dir * (3.0 * dx1 - dx2) / (2.0 * h);
  d.ddx = (3.0 * dx2 - 2.0 * dx1 - dx3) / (h * h);
  d.dr = dir * (3.0 * dr1 - dr2) / (2.0 * h);
  d.ddr = (3.0 * dr2 - 2.0 * dr1 - dr3) / (h * h);
  return d;
}

ConeTangent acceleration_from(const PathDerivatives& d, double t) {
  if (!(d.r > 0.0)) {
    throw VertexError("covariant acceleration at the vertex, t = " + std::to_string(t));
  }
  return {d.ddx + 2.0 * (d.dr / d.r) * d.dx, d.ddr - d.r * d.dx.squaredNorm()};
}

}  // namespace

double cone_distance(const ConePoint& a, const ConePoint& b) {
  require_same_dim(a, b);
  const double theta = std::min((a.x() - b.x()).norm(), std::numbers::pi);
  // r0^2 + r1^2 - 2 r0 r1 cos(theta), rewritten to avoid cancellation.
  const double half_sin = std::sin(0.5 * theta);
  const double dr = a.r() - b.r();
  const double d2 = dr * dr + 4.0 * a.r() * b.r() * half_sin * half_sin;
  return std::sqrt(std::max(d2, 0.0));
}

double cone_inner(const ConePoint& base, const ConeTangent& u, const ConeTangent& w) {
  if (base.is_vertex()) {
    throw VertexError("cone metric is degenerate at the vertex");
  }
  if (u.v.size() != base.dim() || w.v.size() != base.dim()) {
    throw DimensionMismatchError("tangent dimension does not match base point");
  }
  return u.v.dot(w.v) * base.r() * base.r() + u.p * w.p;
}

double cone_norm_squared(const ConePoint& base, const ConeTangent& u) {
  return cone_inner(base, u, u);
}

ConePoint geodesic_eval(const ConePoint& z0, const ConePoint& z1, double t) {
  require_same_dim(z0, z1);
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("geodesic time " + std::to_string(t) + " outside [0, 1]");
  }
  const Vector dx = z1.x() - z0.x();
  const double theta = dx.norm();
  if (theta >= kHalfPi) {
    throw GeodesicDomainError("geodesic endpoints " + std::to_string(theta) +
                              " apart, must be below pi/2");
  }
  if (theta > 0.0 && (z0.is_vertex() || z1.is_vertex())) {
    throw VertexError("geodesic local time undefined with a vertex endpoint");
  }
  if (t == 0.0) {
    return z0;
  }
  if (t == 1.0 || z0 == z1) {
    return z1;
  }
  if (theta == 0.0) {
    return {z0.x(), z0.r() + t * (z1.r() - z0.r())};
  }
  // The geodesic is the straight segment between r0 e^{i0} and r1 e^{i theta}
  // in the plane; (a, b) are the coordinates of its point at time t.
  const double a = (1.0 - t) * z0.r() + t * z1.r() * std::cos(theta);
  const double b = t * z1.r() * std::sin(theta);
  const double r = std::hypot(a, b);
  const double rho = theta < kSeriesAngle ? t * z1.r() * sinc(theta) / a
                                          : std::atan2(b, a) / theta;
  return {z0.x() + rho * dx, r};
}

ConeTangent covariant_acceleration(const ConePath& path, double t, double h, Stencil stencil) {
  if (!(h > 0.0)) {
    throw StepError("finite-difference step must be positive");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw StepError("t = " + std::to_string(t) + " outside [0, 1]");
  }
  if (stencil == Stencil::kCentral) {
    if (t - h < 0.0 || t + h > 1.0) {
      throw StepError("central stencil t +- h leaves [0, 1] at t = " + std::to_string(t));
    }
    return acceleration_from(differentiate(path, t, h, 0.0, 1.0), t);
  }
  const auto breaks = path.breaks();
  auto hi = std::upper_bound(breaks.begin(), breaks.end(), t);
  if (hi == breaks.end()) {
    --hi;
  }
  return acceleration_from(differentiate(path, t, h, *(hi - 1), *hi), t);
}

double path_curvature_cost(const ConePath& path, int n_steps, double h) {
  if (n_steps < 2) {
    throw std::invalid_argument("path_curvature_cost: n_steps must be at least 2");
  }
  const auto breaks = path.breaks();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k];
    const double hi = breaks[k + 1];
    const int m = std::max(2, static_cast<int>(std::lround(n_steps * (hi - lo))));
    const double dt = (hi - lo) / m;
    double piece = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double t = i == m ? hi : lo + i * dt;
      const PathDerivatives d = differentiate(path, t, h, lo, hi);
      const ConeTangent acc = acceleration_from(d, t);
      const double value = d.r * d.r * acc.v.squaredNorm() + acc.p * acc.p;
      piece += (i == 0 || i == m) ? 0.5 * value : value;
    }
    total += piece * dt;
  }
  return total;
}

}  // namespace wfr
