#pragma once

/// @file
/// Seeded random instances for property tests, the self-test and experiments.

#include "sqlift/polyfunc.hpp"
#include "sqlift/reparam.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace sqlift::gen {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
inline int uniform_int(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}
inline Vector normal_vector(Rng &rng, Index n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}
inline Matrix normal_matrix(Rng &rng, Index r, Index c) {
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}
inline Vector random_signs(Rng &rng, Index n) {
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::bernoulli_distribution()(rng) ? 1.0 : -1.0;
  return s;
}

/// Symmetric Q (indefinite unless psd = true), q and r from standard normals.
inline SmoothQuadratic random_quadratic(Rng &rng, Index n, bool psd = false) {
  const Matrix B = normal_matrix(rng, n, n);
  const Matrix Q = psd ? Matrix(B.transpose() * B / static_cast<double>(n))
                       : Matrix(0.5 * (B + B.transpose()));
  return {Q, normal_vector(rng, n), uniform(rng, -1.0, 1.0)};
}

struct Instance {
  QuadraticProblem problem;
  Vector y;
};

/// g = ι of R^n_+ with a random quadratic and a random point.
inline Instance random_orthant_instance(Rng &rng, Index n) {
  return {QuadraticProblem(random_quadratic(rng, n), PolyhedralFunction::nonnegative_indicator(n)),
          normal_vector(rng, n)};
}

struct NonsmoothShape {
  int max_dim = 4;
  int max_pieces = 4;
  int max_rows = 6;
  /// Caps on the generators of ∂g at the base point.
  int max_active_rays = 3;
  int max_lines = 1;
};

/// A polyhedral g and a point y with structure at y²: some coordinates of y²
/// vanish, some pieces tie, some user rows are active. Inactive pieces and
/// rows are separated from activity by at least 0.1.
inline Instance random_nonsmooth_instance(Rng &rng, const NonsmoothShape &shape = {}) {
  const Index n = uniform_int(rng, 1, shape.max_dim);
  Vector x0(n);
  int zeros = 0;
  for (Index i = 0; i < n; ++i) {
    const bool zero = zeros < std::min(2, shape.max_active_rays) && uniform(rng, 0, 1) < 0.4;
    x0(i) = zero ? 0.0 : uniform(rng, 0.2, 2.0);
    zeros += zero;
  }
  Polyhedron dom(n);
  int rows = 0, active = zeros;
  const int want_eq = uniform_int(rng, 0, shape.max_lines);
  for (int e = 0; e < want_eq && rows < shape.max_rows; ++e, ++rows) {
    const Vector a = normal_vector(rng, n);
    dom.add_equality(a, a.dot(x0));
  }
  const int want_ineq = uniform_int(rng, 0, std::max(0, shape.max_rows - rows));
  for (int r = 0; r < want_ineq; ++r, ++rows) {
    const Vector a = normal_vector(rng, n);
    const bool make_active = active < shape.max_active_rays && uniform(rng, 0, 1) < 0.4;
    dom.add_inequality(a, a.dot(x0) + (make_active ? 0.0 : uniform(rng, 0.1, 1.0)));
    active += make_active;
  }
  std::vector<AffinePiece> pieces;
  const int k = uniform_int(rng, 0, shape.max_pieces);
  const double top = uniform(rng, -1.0, 1.0);
  for (int j = 0; j < k; ++j) {
    AffinePiece p{normal_vector(rng, n), 0.0};
    const bool tie = j == 0 || uniform(rng, 0, 1) < 0.5;
    p.b = top - p.a.dot(x0) - (tie ? 0.0 : uniform(rng, 0.1, 1.0));
    pieces.push_back(std::move(p));
  }
  PolyhedralFunction g(std::move(pieces), dom);
  const Vector y = random_signs(rng, n).cwiseProduct(x0.cwiseSqrt());
  return {QuadraticProblem(random_quadratic(rng, n), std::move(g)), y};
}

/// A nonsmooth instance whose f is rebuilt so that y is stationary for the
/// lift: ∇f(y²)_I = −v_I for a random v ∈ ∂g(y²). On I^c the gradient is
/// either −v + (nonnegative) (so y² is also stationary for φ) or random.
inline Instance random_lifted_stationary_instance(Rng &rng, const NonsmoothShape &shape = {}) {
  Instance base = random_nonsmooth_instance(rng, shape);
  const Index n = base.problem.dimension();
  const Vector x = base.y.cwiseProduct(base.y);
  const GeneratorSet dg = g_subdiff(base.problem.g(), x);
  Vector v = Vector::Zero(n);
  {
    Vector lam(dg.num_points());
    for (Index j = 0; j < lam.size(); ++j) lam(j) = uniform(rng, 0.05, 1.0);
    lam /= lam.sum();
    for (Index j = 0; j < lam.size(); ++j) v += lam(j) * dg.points()[j];
    for (const auto &r : dg.rays()) v += uniform(rng, 0.0, 1.0) * r;
    for (const auto &l : dg.lines()) v += uniform(rng, -1.0, 1.0) * l;
  }
  const SupportSplit split = support_set(base.y);
  Vector grad(n);
  const bool phi_stationary = uniform(rng, 0, 1) < 0.5;
  for (Index i : split.support) grad(i) = -v(i);
  for (Index i : split.complement)
    grad(i) = phi_stationary ? -v(i) + uniform(rng, 0.0, 1.0) : normal_vector(rng, 1)(0);
  const SmoothQuadratic f0 = base.problem.f();
  SmoothQuadratic f(f0.Q(), grad - f0.Q() * x, f0.r());
  return {QuadraticProblem(std::move(f), base.problem.g()), base.y};
}

/// The box [-1,1]^n (or [0,1]^n) cut by extra random rows that keep a known
/// interior point; optionally one random equality through that point.
inline Polyhedron random_bounded_polyhedron(Rng &rng, Index n, int extra_rows,
                                            bool with_equality = false) {
  Polyhedron P(n);
  for (Index i = 0; i < n; ++i) {
    P.add_inequality(Vector::Unit(n, i), 1.0);
    P.add_inequality(-Vector::Unit(n, i), 1.0);
  }
  const Vector c = 0.3 * normal_vector(rng, n).cwiseMax(-2.0).cwiseMin(2.0) / 2.0;
  for (int r = 0; r < extra_rows; ++r) {
    const Vector a = normal_vector(rng, n);
    P.add_inequality(a, a.dot(c) + uniform(rng, 0.05, 1.0));
  }
  if (with_equality) {
    const Vector a = normal_vector(rng, n);
    P.add_equality(a, a.dot(c));
  }
  return P;
}

} // namespace sqlift::gen
