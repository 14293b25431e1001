#include "wfr/discrete_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

DiscreteMeasure::DiscreteMeasure(Index dim) : dim_(dim), points_(0, dim), weights_(0) {
  if (dim < 0) {
    throw std::invalid_argument("DiscreteMeasure: negative dimension");
  }
}

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : dim_(points.cols()), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() != weights_.size()) {
    throw DimensionMismatchError("DiscreteMeasure: " + std::to_string(points_.rows()) +
                                 " points but " + std::to_string(weights_.size()) + " weights");
  }
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("DiscreteMeasure: weight " + std::to_string(i) +
                                  " is negative or non-finite");
    }
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("DiscreteMeasure: non-finite point coordinate");
  }
}

DiscreteMeasure DiscreteMeasure::scaled(double c) const {
  if (!(c >= 0.0)) {
    throw std::invalid_argument("DiscreteMeasure::scaled: factor must be nonnegative");
  }
  return DiscreteMeasure(points_, weights_ * c);
}

DiscreteMeasure DiscreteMeasure::positive_part(double relative_threshold) const {
  const double cutoff = size() > 0 ? relative_threshold * weights_.maxCoeff() : 0.0;
  std::vector<Index> keep;
  for (Index i = 0; i < size(); ++i) {
    if (weights_[i] > 0.0 && weights_[i] > cutoff) {
      keep.push_back(i);
    }
  }
  Matrix pts(static_cast<Index>(keep.size()), dim_);
  Vector w(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    pts.row(static_cast<Index>(k)) = points_.row(keep[k]);
    w[static_cast<Index>(k)] = weights_[keep[k]];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.points_.rows() != b.points_.rows() || a.dim_ != b.dim_ || a.points_ != b.points_) {
    throw DimensionMismatchError("measure sum requires identical supports");
  }
  return DiscreteMeasure(a.points_, a.weights_ + b.weights_);
}

bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.dim_ == b.dim_ && a.points_.rows() == b.points_.rows() && a.points_ == b.points_ &&
         a.weights_ == b.weights_;
}

double total_mass(const DiscreteMeasure& mu) { return mu.weights().sum(); }

DiscreteMeasure concatenate(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatchError("concatenate: dimensions differ");
  }
  Matrix pts(a.size() + b.size(), a.dim());
  pts << a.points(), b.points();
  Vector w(a.size() + b.size());
  w << a.weights(), b.weights();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

LiftedMeasure canonical_lift(const DiscreteMeasure& mu) {
  LiftedMeasure lambda{mu.dim(), {}};
  lambda.particles.reserve(static_cast<std::size_t>(mu.size()));
  for (Index i = 0; i < mu.size(); ++i) {
    lambda.particles.push_back({ConePoint(mu.point(i), 1.0), mu.weight(i)});
  }
  return lambda;
}

DiscreteMeasure project_lift(const LiftedMeasure& lambda) {
  const auto n = static_cast<Index>(lambda.particles.size());
  Matrix pts(n, lambda.dim);
  Vector w(n);
  for (Index k = 0; k < n; ++k) {
    const auto& p = lambda.particles[static_cast<std::size_t>(k)];
    if (p.z.dim() != lambda.dim) {
      throw DimensionMismatchError("project_lift: particle dimension mismatch");
    }
    pts.row(k) = p.z.x().transpose();
    w[k] = p.weight * p.z.r() * p.z.r();
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

Grid uniform_grid(const Vector& lo, const Vector& hi, const std::vector<Index>& resolution) {
  const Index d = lo.size();
  if (hi.size() != d || static_cast<Index>(resolution.size()) != d || d == 0) {
    throw DimensionMismatchError("uniform_grid: lo, hi and resolution must agree");
  }
  Index count = 1;
  double volume = 1.0;
  for (Index k = 0; k < d; ++k) {
    const Index n = resolution[static_cast<std::size_t>(k)];
    if (n < 2 || !(hi[k] > lo[k])) {
      throw std::invalid_argument("uniform_grid: need resolution >= 2 and hi > lo");
    }
    count *= n;
    volume *= (hi[k] - lo[k]) / static_cast<double>(n - 1);
  }
  Grid grid{Matrix(count, d), volume};
  // First coordinate varies slowest.
  for (Index idx = 0; idx < count; ++idx) {
    Index rem = idx;
    for (Index k = d - 1; k >= 0; --k) {
      const Index n = resolution[static_cast<std::size_t>(k)];
      const Index i = rem % n;
      rem /= n;
      grid.points(idx, k) = lo[k] + (hi[k] - lo[k]) * static_cast<double>(i) /
                                        static_cast<double>(n - 1);
    }
  }
  return grid;
}

DiscreteMeasure gaussian_bump(const Vector& center, double sigma, double amplitude,
                              const Grid& grid, std::optional<TruncationWindow> window) {
  if (!(sigma > 0.0)) {
    throw InvalidScaleError("gaussian_bump: sigma must be positive, got " +
                            std::to_string(sigma));
  }
  if (!(amplitude >= 0.0)) {
    throw std::invalid_argument("gaussian_bump: amplitude must be nonnegative");
  }
  if (grid.points.rows() == 0) {
    throw std::invalid_argument("gaussian_bump: empty grid");
  }
  if (center.size() != grid.points.cols()) {
    throw DimensionMismatchError("gaussian_bump: center dimension differs from grid");
  }
  const TruncationWindow win = window.value_or(TruncationWindow::default_for(center.size()));
  const double reach =
      win.kind == TruncationWindow::Kind::kSigmaScaled ? win.radius * sigma : win.radius;
  Vector w(grid.points.rows());
  for (Index i = 0; i < w.size(); ++i) {
    const Vector p = grid.points.row(i).transpose();
    const double dist2 = (p - center).squaredNorm();
    const double from = win.kind == TruncationWindow::Kind::kFixedBall ? p.norm() : std::sqrt(dist2);
    w[i] = from <= reach ? amplitude * std::exp(-dist2 / (2.0 * sigma * sigma)) * grid.cell_volume
                         : 0.0;
  }
  return DiscreteMeasure(grid.points, std::move(w));
}

DiscreteMeasure uniform_box(const Vector& lo, const Vector& hi, double density,
                            const Grid& grid) {
  if (lo.size() != grid.points.cols() || hi.size() != grid.points.cols()) {
    throw DimensionMismatchError("uniform_box: box dimension differs from grid");
  }
  if (!(density >= 0.0)) {
    throw std::invalid_argument("uniform_box: density must be nonnegative");
  }
  Vector w(grid.points.rows());
  for (Index i = 0; i < w.size(); ++i) {
    const auto p = grid.points.row(i).transpose();
    const bool inside = (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    w[i] = inside ? density * grid.cell_volume : 0.0;
  }
  return DiscreteMeasure(grid.points, std::move(w));
}

DiscreteMeasure subsample_support(const DiscreteMeasure& mu, Index n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("subsample_support: n must be at least 1");
  }
  std::vector<Index> support;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu.weight(i) > 0.0) {
      support.push_back(i);
    }
  }
  if (support.empty()) {
    throw EmptySupportError("subsample_support: measure has no positive-weight point");
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> picked;
  if (n <= static_cast<Index>(support.size())) {
    std::shuffle(support.begin(), support.end(), rng);
    picked.assign(support.begin(), support.begin() + n);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    for (Index k = 0; k < n; ++k) {
      picked.push_back(support[pick(rng)]);
    }
  }
  const double mass = total_mass(mu);
  Matrix pts(n, mu.dim());
  Vector w = Vector::Constant(n, mass / static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    pts.row(k) = mu.points().row(picked[static_cast<std::size_t>(k)]);
  }
  // Absorb the rounding of mass / n in the last weight.
  if (n > 1) {
    w[n - 1] = std::max(0.0, mass - w.head(n - 1).sum());
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace wfr
