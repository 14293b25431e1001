#pragma once

// Cubic curves on the cone built by three nested levels of geodesic
// interpolation between two knots and two control points.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "wfr/cone_geometry.hpp"

namespace wfr {

/// Physical velocity at a knot: position rate v and mass rate s.
struct KnotVelocity {
  Vector v;
  double s = 0.0;
};

struct ConeSplineSegment {
  /// Start knot, two control points, end knot.
  std::array<ConePoint, 4> points;
  /// Physical duration of the segment; the cascade itself runs on [0, 1].
  double duration = 1.0;
};

/// Same as geodesic_eval.
ConePoint geodesic_midop(const ConePoint& z0, const ConePoint& z1, double t);

/// Control points so that the segment leaves z_start with velocity vel_start
/// and reaches z_end with velocity vel_end over a span of `duration`.
///
/// Requires r > 0 at both knots, s_start > -3 r_start / duration and
/// s_end < 3 r_end / duration (InfeasibleVelocityError naming the bound).
/// Throws CascadeDomainError when the two control points end up half-pi or
/// more apart.
ConeSplineSegment control_points(const ConePoint& z_start, const ConePoint& z_end,
                                 const KnotVelocity& vel_start, const KnotVelocity& vel_end,
                                 double duration);

/// Point of the segment at local time t in [0, 1]. Exact at t = 0 and t = 1.
/// Throws CascadeDomainError if an intermediate pair leaves the half-pi ball
/// or touches the vertex, std::out_of_range for t outside [0, 1].
ConePoint decasteljau_eval(const ConeSplineSegment& seg, double t);

/// Closed-form velocities of the cascade at local times 0 and 1, per unit
/// local time (divide by the duration for physical rates).
std::pair<KnotVelocity, KnotVelocity> endpoint_velocities(const ConeSplineSegment& seg);

struct Knot {
  double time = 0.0;
  ConePoint point;
  KnotVelocity velocity;
};

struct RescaleOptions {
  /// Relative safety margin on the half-pi diameter and the mass-rate bounds.
  double margin = 0.05;
  std::optional<double> space_scale;
  std::optional<double> time_scale;
};

/// Knots in the scaled frame x -> space_scale * x, t -> time_scale * t.
/// Masses are unchanged; v -> v * space_scale / time_scale, s -> s / time_scale.
struct RescaleResult {
  double space_scale = 1.0;
  double time_scale = 1.0;
  std::vector<std::vector<Knot>> trajectories;
  /// Knot mass rates pulled inside (1 - margin) of their feasibility bound.
  int clamped_rates = 0;
};

/// One scale pair shared by all trajectories.
///
/// The mass-rate bounds s * duration / r > -3 and < 3 are invariant under
/// both scalings, so rates outside (1 - margin) of them are clamped per knot
/// (the same value serves both adjacent segments). The space scale is the
/// largest power of two <= 1 keeping every pairwise knot distance of a
/// trajectory and every segment's control-polygon length below
/// (1 - margin) * pi/2; the cascade stays in the convex hull of its control
/// points, so this rules out cascade-domain failures. The time scale defaults
/// to 1 because it cannot change feasibility.
RescaleResult feasible_rescale(const std::vector<std::vector<Knot>>& trajectories,
                               const RescaleOptions& options = {});

}  // namespace wfr
