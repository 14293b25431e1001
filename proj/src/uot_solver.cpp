#include "wfr/uot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wfr/errors.hpp"

namespace wfr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum exp(terms)) over finite entries; -inf if none.
template <typename Terms>
double log_sum_exp(Index n, Terms terms) {
  double top = -kInf;
  for (Index k = 0; k < n; ++k) {
    top = std::max(top, terms(k));
  }
  if (!std::isfinite(top)) {
    return top;
  }
  double acc = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double t = terms(k);
    if (t > -kInf) {
      acc += std::exp(t - top);
    }
  }
  return top + std::log(acc);
}

double kl_term(double p, double q) {
  if (p <= 0.0) {
    return q;
  }
  return p * std::log(p / q) - p + q;
}

double generalized_kl(const Vector& p, const Vector& q) {
  double total = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] <= 0.0) {
      return kInf;
    }
    total += kl_term(p[i], q[i]);
  }
  return total;
}

// Rows i for which no j has finite cost and positive weight on the other side.
std::vector<bool> unreachable(const Matrix& cost, const Vector& other_weights, bool by_row) {
  const Index n = by_row ? cost.rows() : cost.cols();
  const Index m = by_row ? cost.cols() : cost.rows();
  std::vector<bool> dead(static_cast<std::size_t>(n), true);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double c = by_row ? cost(i, j) : cost(j, i);
      if (std::isfinite(c) && other_weights[j] > 0.0) {
        dead[static_cast<std::size_t>(i)] = false;
        break;
      }
    }
  }
  return dead;
}

void check_pair(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (mu0.dim() != mu1.dim()) {
    throw DimensionMismatchError("solver: measures live in different dimensions");
  }
  if (!(total_mass(mu0) > 0.0) || !(total_mass(mu1) > 0.0)) {
    throw EmptySupportError("solver: both measures need positive mass");
  }
}

Matrix plan_from_scalings(const Matrix& cost, const Vector& a, const Vector& b,
                          const Vector& log_u, const Vector& log_v, double eps) {
  Matrix eta = Matrix::Zero(cost.rows(), cost.cols());
  for (Index j = 0; j < cost.cols(); ++j) {
    if (!(b[j] > 0.0) || !std::isfinite(log_v[j])) {
      continue;
    }
    for (Index i = 0; i < cost.rows(); ++i) {
      if (!(a[i] > 0.0) || !std::isfinite(log_u[i]) || !std::isfinite(cost(i, j))) {
        continue;
      }
      eta(i, j) = a[i] * b[j] * std::exp(log_u[i] + log_v[j] - cost(i, j) / eps);
    }
  }
  return eta;
}

// sum a (1 - e^-F) + sum b (1 - e^-G) - eps (sum eta - sum a x b) with
// F = eps log U, G = eps log V.
double dual_value(const Matrix& eta, const Vector& a, const Vector& b, const Vector& log_u,
                  const Vector& log_v, double eps) {
  auto side = [eps](const Vector& w, const Vector& log_s) {
    double total = 0.0;
    for (Index i = 0; i < w.size(); ++i) {
      total += w[i] * (1.0 - std::exp(-eps * log_s[i]));
    }
    return total;
  };
  return side(a, log_u) + side(b, log_v) - eps * (eta.sum() - a.sum() * b.sum());
}

double entropy_penalty(const Matrix& eta, const Vector& a, const Vector& b) {
  double total = 0.0;
  for (Index j = 0; j < eta.cols(); ++j) {
    for (Index i = 0; i < eta.rows(); ++i) {
      total += kl_term(eta(i, j), a[i] * b[j]);
    }
  }
  return total;
}

// Root in l of the decreasing function
//   log(A e^-l + Y e^(-l/eps)) - log(B e^l + X e^(l/eps)),
// all four weights given as logs. Without cross terms l = (log A - log B) / 2.
double block_shift(double log_a, double log_b, double log_x, double log_y, double eps) {
  auto lse2 = [](double p, double q) {
    const double top = std::max(p, q);
    if (top == -kInf) {
      return -kInf;
    }
    return top + std::log(std::exp(p - top) + std::exp(q - top));
  };
  const double balanced = 0.5 * (log_a - log_b);
  if (log_x == -kInf && log_y == -kInf) {
    return balanced;
  }
  auto excess = [&](double l) {
    return lse2(log_a - l, log_y - l / eps) - lse2(log_b + l, log_x + l / eps);
  };
  double lo = balanced;
  double hi = balanced;
  double step = eps;
  const bool root_above = excess(balanced) > 0.0;
  for (int k = 0; k < 2000; ++k) {
    if (root_above ? !(excess(hi) > 0.0) : !(excess(lo) < 0.0)) {
      break;
    }
    if (root_above) {
      lo = hi;
      hi += step;
    } else {
      hi = lo;
      lo -= step;
    }
    step *= 2.0;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-14 * eps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    int& p = parent[static_cast<std::size_t>(x)];
    p = parent[static_cast<std::size_t>(p)];
    x = p;
  }
  return x;
}

// Exact dual ascent along f + l on the rows and g - l on the columns of one
// block at a time. Blocks are the connected components of the plan support
// above a relative threshold, so separated clusters each get their own
// shift; coupling between blocks enters the line search exactly, which keeps
// the dual monotone. A single block is the global translation and leaves the
// kernel unchanged. Returns true when the shifts were absorbed into f, g and
// the kernel needs a rebuild.
bool translate_blocks(const Matrix& kernel, const Vector& a, const Vector& b, Vector& f,
                      Vector& g, Vector& u, Vector& v, const std::vector<bool>& dead_row,
                      const std::vector<bool>& dead_col, double eps, double absorb_threshold) {
  constexpr double kLink = 1e-6;
  constexpr int kMaxBlocks = 512;
  const Index n0 = a.size();
  const Index n1 = b.size();
  auto live_row = [&](Index i) { return !dead_row[static_cast<std::size_t>(i)] && a[i] > 0.0; };
  auto live_col = [&](Index j) { return !dead_col[static_cast<std::size_t>(j)] && b[j] > 0.0; };

  const Vector au = a.cwiseProduct(u);
  const Vector bv = b.cwiseProduct(v);
  const Vector row_mass = au.cwiseProduct(kernel * bv);
  const Vector col_mass = bv.cwiseProduct(kernel.transpose() * au);
  std::vector<int> parent(static_cast<std::size_t>(n0 + n1));
  for (std::size_t k = 0; k < parent.size(); ++k) {
    parent[k] = static_cast<int>(k);
  }
  for (Index j = 0; j < n1; ++j) {
    if (!live_col(j)) {
      continue;
    }
    for (Index i = 0; i < n0; ++i) {
      if (live_row(i) &&
          au[i] * kernel(i, j) * bv[j] > kLink * std::min(row_mass[i], col_mass[j])) {
        const int ri = find_root(parent, static_cast<int>(i));
        const int rj = find_root(parent, static_cast<int>(n0 + j));
        if (ri != rj) {
          parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
        }
      }
    }
  }
  std::vector<int> block(parent.size(), -1);
  std::vector<int> id_of_root(parent.size(), -1);
  int n_blocks = 0;
  for (Index k = 0; k < n0 + n1; ++k) {
    if (k < n0 ? !live_row(k) : !live_col(k - n0)) {
      continue;
    }
    const int root = find_root(parent, static_cast<int>(k));
    if (id_of_root[static_cast<std::size_t>(root)] < 0) {
      id_of_root[static_cast<std::size_t>(root)] = n_blocks++;
    }
    block[static_cast<std::size_t>(k)] = id_of_root[static_cast<std::size_t>(root)];
  }
  if (n_blocks == 0) {
    return false;
  }
  if (n_blocks > kMaxBlocks) {
    for (int& id : block) {
      id = id < 0 ? id : 0;
    }
    n_blocks = 1;
  }
  const auto nb = static_cast<std::size_t>(n_blocks);
  auto block_of = [&](Index k) { return block[static_cast<std::size_t>(k)]; };

  // log sum over the block of w exp(-potential) for both sides.
  std::vector<double> log_a(nb, -kInf), log_b(nb, -kInf);
  auto accumulate = [&](std::vector<double>& acc, int id, double term) {
    double& x = acc[static_cast<std::size_t>(id)];
    const double top = std::max(x, term);
    x = top == -kInf ? -kInf : top + std::log(std::exp(x - top) + std::exp(term - top));
  };
  for (Index i = 0; i < n0; ++i) {
    if (block_of(i) >= 0) {
      accumulate(log_a, block_of(i), std::log(a[i]) - f[i] - eps * std::log(u[i]));
    }
  }
  for (Index j = 0; j < n1; ++j) {
    if (block_of(n0 + j) >= 0) {
      accumulate(log_b, block_of(n0 + j), std::log(b[j]) - g[j] - eps * std::log(v[j]));
    }
  }
  Matrix log_cross = Matrix::Constant(n_blocks, n_blocks, -kInf);
  if (n_blocks > 1) {
    Matrix cross = Matrix::Zero(n_blocks, n_blocks);
    for (Index j = 0; j < n1; ++j) {
      const int bj = block_of(n0 + j);
      if (bj < 0) {
        continue;
      }
      for (Index i = 0; i < n0; ++i) {
        const int bi = block_of(i);
        if (bi >= 0 && bi != bj) {
          cross(bi, bj) += au[i] * kernel(i, j) * bv[j];
        }
      }
    }
    log_cross = cross.array().log().matrix();
  }

  auto lse_off_diagonal = [&](int k, bool by_row) {
    double top = -kInf;
    for (int l = 0; l < n_blocks; ++l) {
      if (l != k) {
        top = std::max(top, by_row ? log_cross(k, l) : log_cross(l, k));
      }
    }
    if (top == -kInf) {
      return -kInf;
    }
    double sum = 0.0;
    for (int l = 0; l < n_blocks; ++l) {
      if (l != k) {
        sum += std::exp((by_row ? log_cross(k, l) : log_cross(l, k)) - top);
      }
    }
    return top + std::log(sum);
  };

  std::vector<double> shift(nb, 0.0);
  bool any_shift = false;
  for (int k = 0; k < n_blocks; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (!std::isfinite(log_a[ks]) || !std::isfinite(log_b[ks])) {
      continue;
    }
    const double lambda = block_shift(log_a[ks], log_b[ks], lse_off_diagonal(k, true),
                                      lse_off_diagonal(k, false), eps);
    if (!std::isfinite(lambda) || lambda == 0.0) {
      continue;
    }
    shift[ks] = lambda;
    any_shift = true;
    for (int l = 0; l < n_blocks; ++l) {
      if (l != k) {
        log_cross(k, l) += lambda / eps;
        log_cross(l, k) -= lambda / eps;
      }
    }
  }
  if (!any_shift) {
    return false;
  }

  Vector log_u_new = Vector::Zero(n0);
  Vector log_v_new = Vector::Zero(n1);
  bool absorb = false;
  for (Index i = 0; i < n0; ++i) {
    if (block_of(i) >= 0) {
      log_u_new[i] = std::log(u[i]) + shift[static_cast<std::size_t>(block_of(i))] / eps;
      absorb = absorb || std::abs(log_u_new[i]) > absorb_threshold;
    }
  }
  for (Index j = 0; j < n1; ++j) {
    if (block_of(n0 + j) >= 0) {
      log_v_new[j] = std::log(v[j]) - shift[static_cast<std::size_t>(block_of(n0 + j))] / eps;
      absorb = absorb || std::abs(log_v_new[j]) > absorb_threshold;
    }
  }
  for (Index i = 0; i < n0; ++i) {
    if (block_of(i) >= 0) {
      if (absorb) {
        f[i] += eps * log_u_new[i];
        u[i] = 1.0;
      } else {
        u[i] = std::exp(log_u_new[i]);
      }
    }
  }
  for (Index j = 0; j < n1; ++j) {
    if (block_of(n0 + j) >= 0) {
      if (absorb) {
        g[j] += eps * log_v_new[j];
        v[j] = 1.0;
      } else {
        v[j] = std::exp(log_v_new[j]);
      }
    }
  }
  if (absorb) {
    // Absorb the untouched zero-weight entries as well so the rebuilt kernel
    // starts from unit scalings everywhere.
    for (Index i = 0; i < n0; ++i) {
      if (block_of(i) < 0 && !dead_row[static_cast<std::size_t>(i)]) {
        f[i] += eps * std::log(u[i]);
        u[i] = 1.0;
      }
    }
    for (Index j = 0; j < n1; ++j) {
      if (block_of(n0 + j) < 0 && !dead_col[static_cast<std::size_t>(j)]) {
        g[j] += eps * std::log(v[j]);
        v[j] = 1.0;
      }
    }
  }
  return absorb;
}

}  // namespace

double transport_cost(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw DimensionMismatchError("transport_cost: dimension mismatch");
  }
  const double d = (x - y).norm();
  if (d >= kHalfPi) {
    return kInf;
  }
  return -2.0 * std::log(std::cos(d));
}

CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target) {
  if (source.dim() != target.dim()) {
    throw DimensionMismatchError("cost_matrix: dimension mismatch");
  }
  CostMatrix c{Matrix(source.size(), target.size())};
  for (Index j = 0; j < target.size(); ++j) {
    const Vector y = target.point(j);
    for (Index i = 0; i < source.size(); ++i) {
      const double d = (source.points().row(i).transpose() - y).norm();
      c.entries(i, j) = d >= kHalfPi ? kInf : -2.0 * std::log(std::cos(d));
    }
  }
  return c;
}

double default_epsilon(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  const DiscreteMeasure joint = concatenate(mu0.positive_part(), mu1.positive_part());
  double diam2 = 0.0;
  const Matrix& p = joint.points();
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = i + 1; j < p.rows(); ++j) {
      diam2 = std::max(diam2, (p.row(i) - p.row(j)).squaredNorm());
    }
  }
  return diam2 > 0.0 ? 1e-3 * diam2 : 1e-3;
}

TransportPlan solve_entropic(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                             const SolverConfig& config) {
  check_pair(mu0, mu1);
  if (std::isnan(config.epsilon) || std::isinf(config.epsilon)) {
    throw std::invalid_argument("solver: epsilon must be finite");
  }
  if (!(config.tol > 0.0) || config.max_iters < 1 || !(config.absorb_threshold > 0.0)) {
    throw std::invalid_argument("solver: tol, max_iters and absorb_threshold must be positive");
  }
  const double eps = config.epsilon > 0.0 ? config.epsilon : default_epsilon(mu0, mu1);
  const double kappa = 1.0 / (1.0 + eps);
  const Matrix cost = cost_matrix(mu0, mu1).entries;
  const Vector& a = mu0.weights();
  const Vector& b = mu1.weights();
  const Index n0 = a.size();
  const Index n1 = b.size();
  const auto dead_row = unreachable(cost, b, true);
  const auto dead_col = unreachable(cost, a, false);

  // Full scalings are U = exp(f / eps) u and V = exp(g / eps) v; the kernel
  // carries the absorbed potentials f, g.
  Vector f = Vector::Zero(n0);
  Vector g = Vector::Zero(n1);
  Vector u = Vector::Ones(n0);
  Vector v = Vector::Ones(n1);
  Matrix kernel(n0, n1);
  auto rebuild = [&] {
    for (Index j = 0; j < n1; ++j) {
      for (Index i = 0; i < n0; ++i) {
        kernel(i, j) = std::isfinite(cost(i, j)) ? std::exp((f[i] + g[j] - cost(i, j)) / eps)
                                                 : 0.0;
      }
    }
  };
  rebuild();

  auto log_scaling = [eps](const Vector& pot, const Vector& scale, const std::vector<bool>& dead) {
    Vector out(pot.size());
    for (Index i = 0; i < pot.size(); ++i) {
      out[i] = dead[static_cast<std::size_t>(i)] ? kInf : pot[i] / eps + std::log(scale[i]);
    }
    return out;
  };

  // Update one side. `sums` are kernel sums against the other side, `other_w`
  // and `other_log` describe the other side for the log-domain fallback.
  auto update = [&](Vector& pot, Vector& scale, const Vector& sums, const std::vector<bool>& dead,
                    bool by_row, const Vector& other_w, const Vector& other_log) {
    bool need_rebuild = false;
    for (Index i = 0; i < pot.size(); ++i) {
      if (dead[static_cast<std::size_t>(i)]) {
        scale[i] = 0.0;
        continue;
      }
      const double s = sums[i];
      if (s > 0.0 && std::isfinite(s)) {
        const double log_scale = -kappa * (pot[i] + std::log(s));
        if (std::abs(log_scale) <= config.absorb_threshold) {
          scale[i] = std::exp(log_scale);
        } else {
          pot[i] += eps * log_scale;
          scale[i] = 1.0;
          need_rebuild = true;
        }
        continue;
      }
      // The absorbed kernel row underflowed: redo it in the log domain and
      // absorb the result.
      const Index m = other_w.size();
      const double lse = log_sum_exp(m, [&](Index j) {
        const double c = by_row ? cost(i, j) : cost(j, i);
        if (!(other_w[j] > 0.0) || !std::isfinite(c) || !std::isfinite(other_log[j])) {
          return -kInf;
        }
        return std::log(other_w[j]) + other_log[j] - c / eps;
      });
      pot[i] = -kappa * eps * lse;
      scale[i] = 1.0;
      need_rebuild = true;
    }
    if (need_rebuild) {
      // Absorb every scaling so the rebuilt kernel starts from u = 1.
      for (Index i = 0; i < pot.size(); ++i) {
        if (!dead[static_cast<std::size_t>(i)]) {
          pot[i] += eps * std::log(scale[i]);
          scale[i] = 1.0;
        }
      }
    }
    return need_rebuild;
  };

  TransportPlan plan;
  plan.epsilon = eps;
  Vector log_u = log_scaling(f, u, dead_row);
  Vector log_v = log_scaling(g, v, dead_col);
  auto sup_change = [](const Vector& now, const Vector& before) {
    double r = 0.0;
    for (Index i = 0; i < now.size(); ++i) {
      if (std::isfinite(now[i]) && std::isfinite(before[i])) {
        r = std::max(r, std::abs(now[i] - before[i]));
      }
    }
    return r;
  };

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const Vector row_sums = kernel * b.cwiseProduct(v);
    if (update(f, u, row_sums, dead_row, true, b, log_v)) {
      rebuild();
    }
    Vector new_log_u = log_scaling(f, u, dead_row);
    const Vector col_sums = kernel.transpose() * a.cwiseProduct(u);
    if (update(g, v, col_sums, dead_col, false, a, new_log_u)) {
      rebuild();
    }
    Vector new_log_v = log_scaling(g, v, dead_col);
    if (config.translate) {
      if (translate_blocks(kernel, a, b, f, g, u, v, dead_row, dead_col, eps,
                           config.absorb_threshold)) {
        rebuild();
      }
      new_log_u = log_scaling(f, u, dead_row);
      new_log_v = log_scaling(g, v, dead_col);
    }
    plan.residual = std::max(sup_change(new_log_u, log_u), sup_change(new_log_v, log_v));
    log_u = new_log_u;
    log_v = new_log_v;
    plan.iterations = iter;
    if (config.record_objective) {
      const Matrix eta = plan_from_scalings(cost, a, b, log_u, log_v, eps);
      plan.objective_trace.push_back(primal_objective(eta, mu0, mu1));
      plan.dual_trace.push_back(dual_value(eta, a, b, log_u, log_v, eps));
    }
    if (!std::isfinite(plan.residual)) {
      break;
    }
    if (plan.residual < config.tol) {
      plan.converged = true;
      break;
    }
  }

  plan.source_log_scaling = log_u;
  plan.target_log_scaling = log_v;
  plan.coupling = plan_from_scalings(cost, a, b, log_u, log_v, eps);
  plan.objective = primal_objective(plan.coupling, mu0, mu1);
  plan.regularized_objective = plan.objective + eps * entropy_penalty(plan.coupling, a, b);
  return plan;
}

TransportPlan normalized(TransportPlan plan) {
  const double m = plan.coupling.sum();
  if (!(m > 0.0)) {
    throw EmptySupportError("normalized: plan carries no mass");
  }
  plan.coupling /= m;
  plan.normalization *= m;
  return plan;
}

double primal_objective(const Matrix& coupling, const DiscreteMeasure& mu0,
                        const DiscreteMeasure& mu1) {
  if (coupling.rows() != mu0.size() || coupling.cols() != mu1.size()) {
    throw DimensionMismatchError("primal_objective: coupling shape differs from the measures");
  }
  const Matrix cost = cost_matrix(mu0, mu1).entries;
  double transport = 0.0;
  for (Index j = 0; j < coupling.cols(); ++j) {
    for (Index i = 0; i < coupling.rows(); ++i) {
      if (coupling(i, j) > 0.0) {
        transport += coupling(i, j) * cost(i, j);
      }
    }
  }
  const Vector m0 = coupling.rowwise().sum();
  const Vector m1 = coupling.colwise().sum().transpose();
  return generalized_kl(m0, mu0.weights()) + generalized_kl(m1, mu1.weights()) + transport;
}

double wfr_distance(const TransportPlan& plan, const DiscreteMeasure& mu0,
                    const DiscreteMeasure& mu1) {
  const double value = primal_objective(plan.coupling * plan.normalization, mu0, mu1);
  return std::sqrt(std::max(0.0, value));
}

Matrix barycentric_map(const TransportPlan& plan, const DiscreteMeasure& target) {
  if (plan.coupling.cols() != target.size()) {
    throw DimensionMismatchError("barycentric_map: coupling columns differ from target size");
  }
  Matrix mapped(plan.coupling.rows(), target.dim());
  for (Index i = 0; i < plan.coupling.rows(); ++i) {
    const double row_mass = plan.coupling.row(i).sum();
    if (!(row_mass > 0.0)) {
      throw DanglingSourceError(static_cast<std::size_t>(i),
                                "barycentric_map: source " + std::to_string(i) +
                                    " has no coupling mass");
    }
    mapped.row(i) = plan.coupling.row(i) * target.points() / row_mass;
  }
  return mapped;
}

namespace {

// log of sum_j w_j exp(log_scale_j - c(q, y_j) / eps) over live points.
double log_kernel_sum(const DiscreteMeasure& other, const Vector& other_log, double eps,
                      const Vector& query, Vector* log_terms = nullptr) {
  const Index m = other.size();
  Vector terms(m);
  for (Index j = 0; j < m; ++j) {
    const double c = transport_cost(query, other.point(j));
    terms[j] = (other.weight(j) > 0.0 && std::isfinite(c) && std::isfinite(other_log[j]))
                   ? std::log(other.weight(j)) + other_log[j] - c / eps
                   : -kInf;
  }
  if (log_terms != nullptr) {
    *log_terms = terms;
  }
  return log_sum_exp(m, [&](Index j) { return terms[j]; });
}

}  // namespace

Vector map_extend(const TransportPlan& plan, const DiscreteMeasure& target, const Vector& query) {
  if (query.size() != target.dim()) {
    throw DimensionMismatchError("map_extend: query dimension differs from target");
  }
  if (plan.target_log_scaling.size() != target.size()) {
    throw DimensionMismatchError("map_extend: plan does not match the target");
  }
  Vector terms;
  const double lse = log_kernel_sum(target, plan.target_log_scaling, plan.epsilon, query, &terms);
  if (!std::isfinite(lse)) {
    throw ZeroWeightError("map_extend: no target point within half-pi of the query");
  }
  Vector out = Vector::Zero(target.dim());
  for (Index j = 0; j < target.size(); ++j) {
    if (terms[j] > -kInf) {
      out += std::exp(terms[j] - lse) * target.point(j);
    }
  }
  return out;
}

DensityRatio density_ratio(const TransportPlan& plan, const DiscreteMeasure& mu, Side side) {
  const Vector marginal =
      side == Side::kSource ? plan.source_marginal() : plan.target_marginal();
  if (marginal.size() != mu.size()) {
    throw DimensionMismatchError("density_ratio: plan does not match the measure");
  }
  DensityRatio out{Vector::Zero(mu.size()), {}};
  for (Index i = 0; i < mu.size(); ++i) {
    if (marginal[i] > 0.0) {
      out.values[i] = mu.weight(i) / marginal[i];
    } else if (mu.weight(i) > 0.0) {
      out.singular.push_back(i);
    }
  }
  return out;
}

double density_ratio_at(const TransportPlan& plan, const DiscreteMeasure& source,
                        const DiscreteMeasure& target, Side side, const Vector& query) {
  const bool from_source = side == Side::kSource;
  const DiscreteMeasure& own = from_source ? source : target;
  const DiscreteMeasure& other = from_source ? target : source;
  const Vector& own_log = from_source ? plan.source_log_scaling : plan.target_log_scaling;
  const Vector& other_log = from_source ? plan.target_log_scaling : plan.source_log_scaling;
  if (own_log.size() != own.size() || other_log.size() != other.size()) {
    throw DimensionMismatchError("density_ratio_at: plan does not match the measures");
  }
  if (query.size() != own.dim()) {
    throw DimensionMismatchError("density_ratio_at: query dimension mismatch");
  }
  const double log_s = log_kernel_sum(other, other_log, plan.epsilon, query);
  if (!std::isfinite(log_s)) {
    return 0.0;
  }
  double log_u = -log_s / (1.0 + plan.epsilon);
  for (Index i = 0; i < own.size(); ++i) {
    if (std::isfinite(own_log[i]) && (own.point(i) - query).squaredNorm() == 0.0) {
      log_u = own_log[i];
      break;
    }
  }
  return std::exp(-log_u - log_s) * plan.normalization;
}

}  // namespace wfr
