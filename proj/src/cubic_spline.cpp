#include "wfr/cubic_spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

CubicFit natural_cubic_fit(KnotSeries series) {
  const auto n_knots = static_cast<Index>(series.times.size());
  if (n_knots < 2) {
    throw std::invalid_argument("natural_cubic_fit: need at least two knots");
  }
  if (series.values.rows() != n_knots) {
    throw DimensionMismatchError("natural_cubic_fit: " + std::to_string(series.values.rows()) +
                                 " value rows for " + std::to_string(n_knots) + " knots");
  }
  for (Index i = 0; i + 1 < n_knots; ++i) {
    const double a = series.times[static_cast<std::size_t>(i)];
    const double b = series.times[static_cast<std::size_t>(i + 1)];
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
      throw NonMonotoneTimesError("natural_cubic_fit: knot times must increase strictly");
    }
  }
  const Matrix& y = series.values;
  const Index m = y.cols();
  const Index last = n_knots - 1;
  auto h = [&](Index i) {
    return series.times[static_cast<std::size_t>(i + 1)] - series.times[static_cast<std::size_t>(i)];
  };

  Matrix moments = Matrix::Zero(n_knots, m);
  const Index interior = n_knots - 2;
  if (interior > 0) {
    // Thomas algorithm on h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = rhs_i.
    std::vector<double> diag(static_cast<std::size_t>(interior));
    std::vector<double> upper(static_cast<std::size_t>(interior));
    Matrix rhs(interior, m);
    for (Index k = 0; k < interior; ++k) {
      const Index i = k + 1;
      diag[static_cast<std::size_t>(k)] = 2.0 * (h(i - 1) + h(i));
      upper[static_cast<std::size_t>(k)] = h(i);
      rhs.row(k) = 6.0 * ((y.row(i + 1) - y.row(i)) / h(i) - (y.row(i) - y.row(i - 1)) / h(i - 1));
    }
    for (Index k = 1; k < interior; ++k) {
      const double lower = h(k);
      const double w = lower / diag[static_cast<std::size_t>(k - 1)];
      diag[static_cast<std::size_t>(k)] -= w * upper[static_cast<std::size_t>(k - 1)];
      rhs.row(k) -= w * rhs.row(k - 1);
    }
    moments.row(interior) = rhs.row(interior - 1) / diag[static_cast<std::size_t>(interior - 1)];
    for (Index k = interior - 2; k >= 0; --k) {
      moments.row(k + 1) = (rhs.row(k) - upper[static_cast<std::size_t>(k)] * moments.row(k + 2)) /
                           diag[static_cast<std::size_t>(k)];
    }
  }

  Matrix velocities(n_knots, m);
  for (Index i = 0; i < last; ++i) {
    velocities.row(i) =
        (y.row(i + 1) - y.row(i)) / h(i) - h(i) * (2.0 * moments.row(i) + moments.row(i + 1)) / 6.0;
  }
  velocities.row(last) = (y.row(last) - y.row(last - 1)) / h(last - 1) +
                         h(last - 1) * (moments.row(last - 1) + 2.0 * moments.row(last)) / 6.0;
  return CubicFit{std::move(series), std::move(moments), std::move(velocities)};
}

Vector cubic_eval(const CubicFit& fit, double t) {
  const auto& times = fit.series.times;
  if (!(t >= times.front() && t <= times.back())) {
    throw std::out_of_range("cubic_eval: t outside the knot range");
  }
  const auto it = std::find(times.begin(), times.end(), t);
  if (it != times.end()) {
    return fit.series.values.row(it - times.begin()).transpose();
  }
  const auto upper = std::upper_bound(times.begin(), times.end(), t);
  const Index i = (upper - times.begin()) - 1;
  const double h = times[static_cast<std::size_t>(i + 1)] - times[static_cast<std::size_t>(i)];
  const double a = (times[static_cast<std::size_t>(i + 1)] - t) / h;
  const double b = (t - times[static_cast<std::size_t>(i)]) / h;
  const Matrix& y = fit.series.values;
  const Matrix& mom = fit.moments;
  const Eigen::RowVectorXd value =
      a * y.row(i) + b * y.row(i + 1) +
      ((a * a * a - a) * mom.row(i) + (b * b * b - b) * mom.row(i + 1)) * (h * h) / 6.0;
  return value.transpose();
}

}  // namespace wfr
