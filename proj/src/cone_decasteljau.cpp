#include "wfr/cone_decasteljau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

namespace {

double sinc(double x) {
  if (std::abs(x) < kSeriesAngle) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

Vector unit_or_zero(const Vector& v) {
  const double n = v.norm();
  return n > 0.0 ? Vector(v / n) : Vector::Zero(v.size());
}

double polygon_length(const ConeSplineSegment& seg) {
  double len = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    len += (seg.points[k + 1].x() - seg.points[k].x()).norm();
  }
  return len;
}

}  // namespace

ConePoint geodesic_midop(const ConePoint& z0, const ConePoint& z1, double t) {
  return geodesic_eval(z0, z1, t);
}

ConeSplineSegment control_points(const ConePoint& z_start, const ConePoint& z_end,
                                 const KnotVelocity& vel_start, const KnotVelocity& vel_end,
                                 double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("control_points: duration must be positive");
  }
  if (z_start.dim() != z_end.dim() || vel_start.v.size() != z_start.dim() ||
      vel_end.v.size() != z_start.dim()) {
    throw DimensionMismatchError("control_points: dimension mismatch");
  }
  if (z_start.is_vertex() || z_end.is_vertex()) {
    throw VertexError("control_points: knot masses must be positive");
  }
  const double r0 = z_start.r();
  const double r3 = z_end.r();
  const double start_denominator = vel_start.s / r0 + 3.0 / duration;
  if (!(start_denominator > 0.0)) {
    throw InfeasibleVelocityError(InfeasibleVelocityError::Bound::kStartMassRate,
                                  "control_points: start mass rate " +
                                      std::to_string(vel_start.s) + " at or below -3 r / duration");
  }
  const double end_denominator = 3.0 / duration - vel_end.s / r3;
  if (!(end_denominator > 0.0)) {
    throw InfeasibleVelocityError(InfeasibleVelocityError::Bound::kEndMassRate,
                                  "control_points: end mass rate " + std::to_string(vel_end.s) +
                                      " at or above 3 r / duration");
  }
  const double speed0 = vel_start.v.norm();
  const double speed3 = vel_end.v.norm();
  const double angle1 = std::atan2(speed0, start_denominator);
  const double ratio1 = duration / 3.0 * std::hypot(speed0, start_denominator);
  const double angle2 = std::atan2(speed3, end_denominator);
  const double ratio2 = duration / 3.0 * std::hypot(speed3, end_denominator);

  ConeSplineSegment seg{{z_start, ConePoint(z_start.x() + angle1 * unit_or_zero(vel_start.v), ratio1 * r0),
                         ConePoint(z_end.x() - angle2 * unit_or_zero(vel_end.v), ratio2 * r3), z_end},
                        duration};
  const double middle = (seg.points[2].x() - seg.points[1].x()).norm();
  if (middle >= kHalfPi) {
    throw CascadeDomainError("control_points: control points " + std::to_string(middle) +
                             " apart, must be below pi/2");
  }
  return seg;
}

ConePoint decasteljau_eval(const ConeSplineSegment& seg, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("decasteljau_eval: t outside [0, 1]");
  }
  try {
    const auto& z = seg.points;
    const ConePoint w0 = geodesic_eval(z[0], z[1], t);
    const ConePoint w1 = geodesic_eval(z[1], z[2], t);
    const ConePoint w2 = geodesic_eval(z[2], z[3], t);
    const ConePoint u0 = geodesic_eval(w0, w1, t);
    const ConePoint u1 = geodesic_eval(w1, w2, t);
    return geodesic_eval(u0, u1, t);
  } catch (const GeodesicDomainError& e) {
    throw CascadeDomainError(std::string("decasteljau_eval: ") + e.what());
  } catch (const VertexError& e) {
    throw CascadeDomainError(std::string("decasteljau_eval: ") + e.what());
  }
}

std::pair<KnotVelocity, KnotVelocity> endpoint_velocities(const ConeSplineSegment& seg) {
  const auto& z = seg.points;
  const Vector d01 = z[1].x() - z[0].x();
  const Vector d23 = z[3].x() - z[2].x();
  const double th01 = d01.norm();
  const double th23 = d23.norm();
  KnotVelocity start{3.0 * (z[1].r() / z[0].r()) * sinc(th01) * d01,
                     3.0 * (z[1].r() * std::cos(th01) - z[0].r())};
  KnotVelocity end{3.0 * (z[2].r() / z[3].r()) * sinc(th23) * d23,
                   3.0 * (z[3].r() - z[2].r() * std::cos(th23))};
  return {std::move(start), std::move(end)};
}

RescaleResult feasible_rescale(const std::vector<std::vector<Knot>>& trajectories,
                               const RescaleOptions& options) {
  const double margin = options.margin;
  if (!(margin >= 0.0 && margin < 1.0)) {
    throw std::invalid_argument("feasible_rescale: margin must lie in [0, 1)");
  }
  const double tau = options.time_scale.value_or(1.0);
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidScaleError("feasible_rescale: time scale must be positive");
  }
  if (options.space_scale && (!(*options.space_scale > 0.0) || !std::isfinite(*options.space_scale))) {
    throw InvalidScaleError("feasible_rescale: space scale must be positive");
  }
  for (const auto& traj : trajectories) {
    if (traj.size() < 2) {
      throw std::invalid_argument("feasible_rescale: every trajectory needs two knots");
    }
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
      if (!(traj[k + 1].time > traj[k].time)) {
        throw NonMonotoneTimesError("feasible_rescale: knot times must increase strictly");
      }
    }
  }

  RescaleResult out;
  out.time_scale = tau;
  out.trajectories = trajectories;

  // Mass rates: clamp into (1 - margin) of the bounds of both adjacent segments.
  const double reach = 3.0 * (1.0 - margin);
  for (auto& traj : out.trajectories) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
      double& s = traj[k].velocity.s;
      const double r = traj[k].point.r();
      if (!(r > 0.0)) {
        throw VertexError("feasible_rescale: knot mass must be positive");
      }
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      if (k + 1 < traj.size()) {
        lo = -reach * r / (traj[k + 1].time - traj[k].time);
      }
      if (k > 0) {
        hi = reach * r / (traj[k].time - traj[k - 1].time);
      }
      const double clamped = std::clamp(s, lo, hi);
      if (clamped != s) {
        s = clamped;
        ++out.clamped_rates;
      }
    }
  }

  const double limit = kHalfPi * (1.0 - margin);
  auto feasible_at = [&](double c) {
    for (const auto& traj : out.trajectories) {
      for (std::size_t i = 0; i < traj.size(); ++i) {
        for (std::size_t j = i + 1; j < traj.size(); ++j) {
          if (c * (traj[i].point.x() - traj[j].point.x()).norm() >= limit) {
            return false;
          }
        }
      }
      for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const ConePoint a(c * traj[k].point.x(), traj[k].point.r());
        const ConePoint b(c * traj[k + 1].point.x(), traj[k + 1].point.r());
        const ConeSplineSegment seg =
            control_points(a, b, {c * traj[k].velocity.v, traj[k].velocity.s},
                           {c * traj[k + 1].velocity.v, traj[k + 1].velocity.s},
                           traj[k + 1].time - traj[k].time);
        if (!(polygon_length(seg) < limit)) {
          return false;
        }
      }
    }
    return true;
  };

  double c = 1.0;
  if (options.space_scale) {
    c = *options.space_scale;
  } else {
    // Each halving at least halves every length once the angles are small.
    for (int halvings = 0; halvings < 200; ++halvings) {
      bool ok = false;
      try {
        ok = feasible_at(c);
      } catch (const CascadeDomainError&) {
        ok = false;
      }
      if (ok) {
        break;
      }
      c *= 0.5;
    }
  }
  out.space_scale = c;

  for (auto& traj : out.trajectories) {
    for (auto& knot : traj) {
      knot.time *= tau;
      knot.point = ConePoint(c * knot.point.x(), knot.point.r());
      knot.velocity.v *= c / tau;
      knot.velocity.s /= tau;
    }
  }
  return out;
}

}  // namespace wfr
