#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "wfr/cone_geometry.hpp"

namespace wfr {

using Matrix = Eigen::MatrixXd;

/// Nonnegative weighted point cloud on R^d. Points are stored one per row.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(Index dim);
  DiscreteMeasure(Matrix points, Vector weights);

  Index size() const { return weights_.size(); }
  Index dim() const { return dim_; }
  bool empty() const { return size() == 0; }

  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Vector point(Index i) const { return points_.row(i).transpose(); }
  double weight(Index i) const { return weights_[i]; }

  /// Same points, weights multiplied by c >= 0.
  DiscreteMeasure scaled(double c) const;

  /// Drops points whose weight is <= threshold * max weight (zero weights
  /// are always dropped).
  DiscreteMeasure positive_part(double relative_threshold = 0.0) const;

  /// Pointwise sum of two measures on the same support.
  friend DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);
  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  Index dim_ = 0;
  Matrix points_;
  Vector weights_;
};

double total_mass(const DiscreteMeasure& mu);

/// Union of the two supports with their weights.
DiscreteMeasure concatenate(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct LiftedParticle {
  ConePoint z;
  double weight = 0.0;
};

struct LiftedMeasure {
  Index dim = 0;
  std::vector<LiftedParticle> particles;
};

LiftedMeasure canonical_lift(const DiscreteMeasure& mu);

/// Projection to R^d: each particle contributes weight * r^2 at its position.
DiscreteMeasure project_lift(const LiftedMeasure& lambda);

/// Tensor-product grid of nodes including the box corners.
struct Grid {
  Matrix points;
  double cell_volume = 0.0;
};

Grid uniform_grid(const Vector& lo, const Vector& hi, const std::vector<Index>& resolution);

/// Support window of a truncated Gaussian bump.
struct TruncationWindow {
  enum class Kind { kSigmaScaled, kAbsolute, kFixedBall };
  Kind kind = Kind::kSigmaScaled;
  double radius = 2.0;

  /// |x - center| <= radius * sigma.
  static TruncationWindow sigma_scaled(double radius = 2.0) {
    return {Kind::kSigmaScaled, radius};
  }
  /// |x - center| <= radius, independent of sigma.
  static TruncationWindow absolute(double radius = 2.0) { return {Kind::kAbsolute, radius}; }
  /// |x| <= radius, independent of both center and sigma.
  static TruncationWindow fixed_ball(double radius = 2.0) { return {Kind::kFixedBall, radius}; }
  /// Sigma-scaled in one dimension, the fixed radius-2 ball otherwise.
  static TruncationWindow default_for(Index dim) {
    return dim == 1 ? sigma_scaled() : fixed_ball();
  }
};

/// amplitude * exp(-|x - center|^2 / (2 sigma^2)) inside the window, sampled on
/// the grid nodes and multiplied by the grid cell volume.
DiscreteMeasure gaussian_bump(const Vector& center, double sigma, double amplitude,
                              const Grid& grid,
                              std::optional<TruncationWindow> window = std::nullopt);

/// density * indicator of the box [lo, hi] on the grid nodes, times cell volume.
DiscreteMeasure uniform_box(const Vector& lo, const Vector& hi, double density, const Grid& grid);

/// n points drawn uniformly from the positive-weight support, without
/// replacement when n does not exceed the support size. Every point carries
/// total_mass(mu) / n.
DiscreteMeasure subsample_support(const DiscreteMeasure& mu, Index n, std::uint64_t seed);

}  // namespace wfr
