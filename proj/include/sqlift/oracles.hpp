#pragma once

/// @file
/// Brute-force reference computations. Each one is deliberately independent
/// of the LP/QP machinery it is used to check, and each refuses inputs that
/// are too large for exhaustive search.

#include "sqlift/polyfunc.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace sqlift::oracles {

struct OracleConfig {
  /// Subdivisions of the coefficient grid (λ-simplex and μ-box).
  int resolution = 8;
  /// Ray coefficients are searched over [0, max(coefficient_bound, B*)] where
  /// B* is derived from the generators so that the box holds a minimizer.
  double coefficient_bound = 4.0;
  /// Step lengths for second-order difference quotients, largest first.
  std::vector<double> t_grid = {1e-1, 1e-2, 1e-3};
  /// Perturbations of the direction: grid points per axis (n ≤ 2) ...
  int grid_points_per_dim = 401;
  /// ... or uniform random samples (n > 2).
  int random_perturbations = 4000;
  /// Domain membership is relaxed to slack_factor·t² when forming quotients,
  /// so that curved feasible arcs are hit by a finite sample.
  double slack_factor = 1e-2;
  double divergence_threshold = 1e6;
  int inequality_samples = 400;
  std::uint64_t seed = 0;

  void validate() const {
    if (resolution < 8) throw Error(ErrorKind::InvalidRange, "oracle resolution must be ≥ 8");
    if (!(coefficient_bound > 0) || !std::isfinite(coefficient_bound))
      throw Error(ErrorKind::InvalidRange, "oracle coefficient bound must be finite and > 0");
  }
};

// ---------------------------------------------------------------------------
// Vertex enumeration
// ---------------------------------------------------------------------------

namespace detail {
inline void for_each_subset(Index n, Index k, const std::function<void(const std::vector<Index> &)> &fn) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}
} // namespace detail

/// All vertices of a bounded polyhedron by exhaustive basis enumeration.
inline std::vector<Vector> enumerate_vertices(const Polyhedron &P, bool check_bounded = true) {
  const Index n = P.dimension();
  const Index mi = P.A_ineq().rows(), me = P.A_eq().rows();
  if (n > 8 || mi + me > 16)
    throw Error(ErrorKind::TooLarge, "vertex enumeration is limited to n ≤ 8 and 16 rows");
  if (check_bounded) {
    for (Index i = 0; i < n; ++i) {
      for (double s : {1.0, -1.0}) {
        LPProblem lp = LPProblem::free_variables(n);
        lp.objective(i) = s;
        lp.A_ineq = P.A_ineq();
        lp.b_ineq = P.b_ineq();
        lp.A_eq = P.A_eq();
        lp.b_eq = P.b_eq();
        const LPOutcome out = lp_solve(lp);
        if (out.status == LPStatus::Infeasible) return {};
        if (out.status == LPStatus::Unbounded)
          throw Error(ErrorKind::UnboundedPolyhedron, "vertex enumeration needs a bounded polyhedron");
      }
    }
  }
  if (me > n) {
    // Overdetermined equalities: still enumerate subsets containing an
    // independent n-subset of rows. Handled by the general loop below.
  }
  // Rows: equalities first, then inequalities.
  Matrix A(me + mi, n);
  Vector b(me + mi);
  if (me) {
    A.topRows(me) = P.A_eq();
    b.head(me) = P.b_eq();
  }
  if (mi) {
    A.bottomRows(mi) = P.A_ineq();
    b.tail(mi) = P.b_ineq();
  }
  std::vector<Vector> out;
  auto consider = [&](const std::vector<Index> &rows) {
    Matrix B(n, n);
    Vector rhs(n);
    for (Index r = 0; r < n; ++r) {
      B.row(r) = A.row(rows[r]);
      rhs(r) = b(rows[r]);
    }
    Eigen::FullPivLU<Matrix> lu(B);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) return;
    const Vector z = lu.solve(rhs);
    if (!P.contains(z, 1e-9)) return;
    for (const auto &v : out)
      if ((v - z).cwiseAbs().maxCoeff() <= 1e-9) return;
    out.push_back(z);
  };
  detail::for_each_subset(me + mi, n, [&](const std::vector<Index> &rows) {
    // Every equality row must be tight; it is when feasibility holds, so any
    // subset works, but we skip subsets missing an equality when me ≤ n to
    // keep the enumeration small.
    if (me <= n)
      for (Index e = 0; e < me; ++e)
        if (rows[e] != e) return;
    consider(rows);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Grid search for the weighted minimum norm
// ---------------------------------------------------------------------------

struct GridMinNorm {
  double value = 0.0;
  /// 2 · (grid step) · (Lipschitz bound of the objective in the coefficients).
  double tolerance = 0.0;
};

namespace detail {
inline void simplex_grid(Index parts, int total, std::vector<int> &cur,
                         const std::function<void(const std::vector<int> &)> &fn) {
  if (static_cast<Index>(cur.size()) == parts - 1) {
    int used = 0;
    for (int c : cur) used += c;
    cur.push_back(total - used);
    fn(cur);
    cur.pop_back();
    return;
  }
  int used = 0;
  for (int c : cur) used += c;
  for (int c = 0; c <= total - used; ++c) {
    cur.push_back(c);
    simplex_grid(parts, total, cur, fn);
    cur.pop_back();
  }
}

/// Some minimizer has ‖μ‖ ≤ D / σ_min(C_S), where C holds the weighted rays
/// with their line components removed, D bounds ‖Cμ‖ at any minimizer by
/// comparison with μ = 0, and C_S ranges over linearly independent column
/// subsets (Carathéodory). Inputs are already projected.
inline double ray_coefficient_bound(const Vector &s, const std::vector<Vector> &points,
                                    const std::vector<Vector> &rays) {
  const Index nr = static_cast<Index>(rays.size());
  if (nr == 0) return 0.0;
  double worst_vertex = 0.0;
  for (const auto &p : points) worst_vertex = std::max(worst_vertex, (s + p).norm());
  const double D = 2.0 * worst_vertex;
  double cmax = 0.0;
  for (const auto &c : rays) cmax = std::max(cmax, c.norm());
  if (cmax == 0.0) return 0.0;
  double sigma = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << nr); ++mask) {
    std::vector<Index> cols;
    for (Index k = 0; k < nr; ++k)
      if (mask & (1u << k)) cols.push_back(k);
    if (static_cast<Index>(cols.size()) > s.size()) continue;
    Matrix sub(s.size(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Index>(j)) = rays[cols[j]];
    const double smin = Eigen::JacobiSVD<Matrix>(sub).singularValues().minCoeff();
    if (smin <= 1e-12 * cmax) continue;
    sigma = std::min(sigma, smin);
  }
  return std::isfinite(sigma) ? D / sigma : 0.0;
}
} // namespace detail

/// min over a coefficient grid of ‖weights∘(shift + Σλp + Σμr + Σνℓ)‖. λ runs
/// over the simplex grid of the given resolution, μ over a uniform grid on
/// [0, bound]; ν is eliminated exactly by least squares at every node.
inline GridMinNorm grid_min_norm(const GeneratorSet &S, const Vector &shift,
                                 const Vector &weights, const OracleConfig &cfg = {}) {
  cfg.validate();
  const Index n = S.dimension();
  require_dim(shift.size(), n, "grid shift");
  require_dim(weights.size(), n, "grid weights");
  if (S.empty()) throw Error(ErrorKind::EmptySet, "grid_min_norm on an empty set");
  const Index np = S.num_points(), nr = S.num_rays(), nl = S.num_lines();
  if (np > 4 || nr > 3 || nl > 2)
    throw Error(ErrorKind::TooLarge, "grid_min_norm: at most 4 points, 3 rays, 2 lines");

  const int r = cfg.resolution;
  std::vector<Vector> Wp, Wr;
  for (const auto &p : S.points()) Wp.push_back(weights.cwiseProduct(p));
  for (const auto &q : S.rays()) Wr.push_back(weights.cwiseProduct(q));
  const Vector Ws = weights.cwiseProduct(shift);

  // Orthonormal basis of range(W·L).
  Matrix Qbasis(n, 0);
  if (nl > 0) {
    Matrix WL(n, nl);
    for (Index k = 0; k < nl; ++k) WL.col(k) = weights.cwiseProduct(S.lines()[k]);
    Eigen::ColPivHouseholderQR<Matrix> qr(WL);
    qr.setThreshold(1e-12);
    const Index rank = qr.rank();
    Matrix Qfull = qr.householderQ() * Matrix::Identity(n, n);
    Qbasis = Qfull.leftCols(rank);
  }
  auto project = [&](const Vector &u) -> Vector {
    if (Qbasis.cols() == 0) return u;
    return u - Qbasis * (Qbasis.transpose() * u);
  };
  auto residual_norm = [&](const Vector &u) { return project(u).norm(); };

  std::vector<Vector> Pp, Pr;
  for (const auto &p : Wp) Pp.push_back(project(p));
  for (const auto &q : Wr) Pr.push_back(project(q));
  const double B = std::max(cfg.coefficient_bound, detail::ray_coefficient_bound(project(Ws), Pp, Pr));

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> cur;
  std::vector<int> mu(static_cast<std::size_t>(nr), 0);
  detail::simplex_grid(np, r, cur, [&](const std::vector<int> &lam) {
    Vector base = Ws;
    for (Index j = 0; j < np; ++j) base += (static_cast<double>(lam[j]) / r) * Wp[j];
    std::fill(mu.begin(), mu.end(), 0);
    while (true) {
      Vector u = base;
      for (Index k = 0; k < nr; ++k) u += (B * mu[k] / r) * Wr[k];
      best = std::min(best, residual_norm(u));
      Index k = 0;
      while (k < nr && mu[k] == r) mu[k++] = 0;
      if (k == nr) break;
      ++mu[k];
    }
  });

  double lip_points = 0.0, lip_rays = 0.0;
  for (const auto &p : Wp) lip_points = std::max(lip_points, p.norm());
  for (const auto &q : Wr) lip_rays += q.norm();
  // Nearest-node distance: ‖Δλ‖₁ ≤ np/r, |Δμ_k| ≤ B/(2r).
  const double step_err = lip_points * static_cast<double>(np) / r + lip_rays * B / (2.0 * r);
  return {best, 2.0 * step_err};
}

// ---------------------------------------------------------------------------
// Definitional second subderivative
// ---------------------------------------------------------------------------

/// H(y, slack): extended-real oracle whose domain test may be relaxed by `slack`.
using RelaxedOracle = std::function<ExtendedReal(const Vector &, double)>;

/// y ↦ g(y²) with the domain tolerance widened to max(τ, slack).
inline RelaxedOracle lifted_g_oracle(const PolyhedralFunction &g) {
  return [g](const Vector &y, double slack) {
    return g_eval(g, y.cwiseProduct(y), std::max(tol::feasibility, slack));
  };
}

struct FdSecondSubderivative {
  ExtendedReal value;
  /// (t, smallest quotient found at t); +inf entries mean no feasible sample.
  std::vector<std::pair<double, double>> trend;
  bool feasible_arc_found = false;
};

/// Minimum of [H(ȳ + t w̃) − H(ȳ) − t⟨λ, w̃⟩] / (½t²) over sampled w̃ within t of
/// w, for each t of the grid; the value reported is the one at the smallest t.
/// As a finite search this over-estimates the liminf, up to the O(slack_factor)
/// effect of the relaxed domain test.
inline FdSecondSubderivative fd_second_subderivative(const RelaxedOracle &H,
                                                     const Vector &ybar,
                                                     const Vector &lambda, const Vector &w,
                                                     const OracleConfig &cfg = {}) {
  const Index n = ybar.size();
  require_dim(lambda.size(), n, "fd multiplier");
  require_dim(w.size(), n, "fd direction");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  FdSecondSubderivative out;
  for (double t : cfg.t_grid) {
    const double slack = cfg.slack_factor * t * t;
    const ExtendedReal h0 = H(ybar, slack);
    if (!h0.is_finite())
      throw Error(ErrorKind::OutOfDomain, "fd_second_subderivative: H(ȳ) is not finite");
    double best = std::numeric_limits<double>::infinity();
    auto visit = [&](const Vector &wt) {
      const ExtendedReal h = H(ybar + t * wt, slack);
      if (!h.is_finite()) return;
      const double q = (h.value() - h0.value() - t * lambda.dot(wt)) / (0.5 * t * t);
      best = std::min(best, q);
    };
    visit(w);
    const int m = cfg.grid_points_per_dim;
    if (n <= 2 && m >= 2) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        Vector wt = w;
        for (Index i = 0; i < n; ++i) wt(i) += t * (-1.0 + 2.0 * idx[i] / (m - 1));
        visit(wt);
        Index k = 0;
        while (k < n && idx[k] == m - 1) idx[k++] = 0;
        if (k == n) break;
        ++idx[k];
      }
    } else {
      for (int s = 0; s < cfg.random_perturbations; ++s) {
        Vector wt = w;
        for (Index i = 0; i < n; ++i) wt(i) += t * unif(rng);
        visit(wt);
      }
    }
    out.trend.emplace_back(t, best);
  }
  const double last = out.trend.empty() ? std::numeric_limits<double>::infinity()
                                        : out.trend.back().second;
  out.feasible_arc_found = std::isfinite(last) && last <= cfg.divergence_threshold;
  out.value = out.feasible_arc_found ? ExtendedReal(last) : ExtendedReal::pos_inf();
  return out;
}

// ---------------------------------------------------------------------------
// Subgradient inequality
// ---------------------------------------------------------------------------

using ExtendedOracle = std::function<ExtendedReal(const Vector &)>;

/// True iff g(z) ≥ g(x) + ⟨v, z − x⟩ − tol for every sample z.
inline bool subgradient_inequality_check(const ExtendedOracle &g, const Vector &x,
                                         const Vector &v, const std::vector<Vector> &samples,
                                         double tol = 1e-9) {
  const ExtendedReal gx = g(x);
  if (!gx.is_finite()) throw Error(ErrorKind::OutOfDomain, "subgradient check at x ∉ dom g");
  for (const auto &z : samples) {
    const ExtendedReal gz = g(z);
    if (!gz.is_finite()) continue;
    if (gz.value() < gx.value() + v.dot(z - x) - tol) return false;
  }
  return true;
}

/// Feasible points of a polyhedron around x: projections of a local grid
/// (n ≤ 3) and of random points at several radii.
inline std::vector<Vector> feasible_samples(const Polyhedron &P, const Vector &x,
                                            const OracleConfig &cfg = {}) {
  const Index n = P.dimension();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> out;
  const double radii[] = {1e-2, 1e-1, 1.0, 3.0};
  if (n <= 3) {
    const int m = 5;
    for (double rad : radii) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        Vector z = x;
        for (Index i = 0; i < n; ++i) z(i) += rad * (-1.0 + 2.0 * idx[i] / (m - 1));
        out.push_back(project_onto_polyhedron(P, z));
        Index k = 0;
        while (k < n && idx[k] == m - 1) idx[k++] = 0;
        if (k == n) break;
        ++idx[k];
      }
    }
  }
  for (int s = 0; s < cfg.inequality_samples; ++s) {
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = normal(rng);
    out.push_back(project_onto_polyhedron(P, x + radii[s % 4] * u));
  }
  return out;
}

inline bool subgradient_inequality_check(const PolyhedralFunction &g, const Vector &x,
                                         const Vector &v, const OracleConfig &cfg = {}) {
  return subgradient_inequality_check([&g](const Vector &z) { return g_eval(g, z); }, x, v,
                                      feasible_samples(g.domain(), x, cfg));
}

} // namespace sqlift::oracles
