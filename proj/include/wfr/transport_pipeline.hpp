#pragma once

// Transport splines: couple consecutive measures, follow each source particle
// through the composed entropic maps, assign cone masses from density ratios,
// and join the particle knots with cone De Casteljau cubics.

#include <vector>

#include "wfr/cone_decasteljau.hpp"
#include "wfr/discrete_measure.hpp"
#include "wfr/uot_solver.hpp"

namespace wfr {

/// How a particle's cone mass is read off at a knot.
enum class MassRule {
  kSigma,   // r^2 = d mu / d eta of the unit-mass plan, particle weight from the plan
  kSqrtMu,  // r^2 = kernel-smoothed point mass of mu, unit particle weight
};

/// Which plan marginal supplies the density ratio at interior knots.
enum class MarginalRule {
  kForward,   // source marginal of the outgoing plan
  kBackward,  // target marginal of the incoming plan
  kAverage,   // harmonic mean of the two ratios
};

struct PipelineConfig {
  SolverConfig solver;
  MassRule mass_rule = MassRule::kSigma;
  MarginalRule marginal_rule = MarginalRule::kForward;
  RescaleOptions rescale;
  /// Support points lighter than this fraction of the heaviest are dropped
  /// before solving.
  double support_threshold = 0.0;
};

struct ParticleTrajectory {
  /// Row of the first measure the particle starts from.
  Index source = 0;
  double weight = 0.0;
  std::vector<Vector> positions;
  std::vector<double> masses;
  std::vector<KnotVelocity> velocities;
  /// In the rescaled frame.
  std::vector<ConeSplineSegment> segments;
};

struct SegmentDiagnostics {
  double epsilon = 0.0;
  double distance = 0.0;
  double objective = 0.0;
  double plan_mass = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct TrajectorySet {
  Index dim = 0;
  std::vector<double> times;
  std::vector<ParticleTrajectory> particles;
  std::vector<SegmentDiagnostics> segments;
  std::vector<double> input_masses;
  /// First-measure mass carried by particles that were dropped.
  double vanished_mass = 0.0;
  int vanished_count = 0;
  double space_scale = 1.0;
  double time_scale = 1.0;
  int clamped_rates = 0;

  bool all_converged() const;
};

/// Throws std::invalid_argument family errors on malformed input.
TrajectorySet build_trajectories(const std::vector<DiscreteMeasure>& measures,
                                 const std::vector<double>& times,
                                 const PipelineConfig& config = {});

/// Natural cubic spline velocities of positions and masses at the knots.
void estimate_knot_velocities(ParticleTrajectory& traj, const std::vector<double>& times);

/// One feasibility rescale for all particles, then control points per segment.
void assemble_spline(TrajectorySet& set, const RescaleOptions& options = {});

/// Full pipeline: build, estimate velocities, assemble.
TrajectorySet transport_spline(const std::vector<DiscreteMeasure>& measures,
                               const std::vector<double>& times,
                               const PipelineConfig& config = {});

struct MeasureCurve {
  std::vector<double> times;
  std::vector<DiscreteMeasure> measures;
  /// Indices into `times` that fall on knots.
  std::vector<std::size_t> knot_samples;
};

/// `samples_per_segment` evenly spaced times per segment plus the final knot.
/// Knot times emit the stored knot data exactly; other times are mapped back
/// from the rescaled frame.
MeasureCurve sample_curve(const TrajectorySet& set, int samples_per_segment);

/// Measure emitted at knot k.
DiscreteMeasure knot_measure(const TrajectorySet& set, std::size_t k);

struct CurvatureReport {
  std::vector<double> per_particle;
  double total = 0.0;
};

/// Weighted curvature cost of every particle path in the rescaled frame and
/// clock, with about `steps` quadrature intervals over the whole time span.
CurvatureReport curve_curvature_report(const TrajectorySet& set, int steps = 400,
                                       double h = kDefaultStep);

}  // namespace wfr
