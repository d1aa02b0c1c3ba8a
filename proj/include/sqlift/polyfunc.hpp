#pragma once

/// @file
/// The composite problem φ = f + g with f smooth and g polyhedral,
/// dom g ⊆ R^n_+, together with the exact subdifferential of g and φ.

#include "sqlift/polyhedron.hpp"

#include <concepts>
#include <utility>
#include <vector>

namespace sqlift {

/// Any smooth oracle exposing value, gradient and Hessian.
template <typename F>
concept SmoothFunction = requires(const F &f, const Vector &x) {
  { f.dimension() } -> std::convertible_to<Index>;
  { f.value(x) } -> std::convertible_to<double>;
  { f.gradient(x) } -> std::convertible_to<Vector>;
  { f.hessian(x) } -> std::convertible_to<Matrix>;
};

/// f(x) = ½⟨x, Qx⟩ + ⟨q, x⟩ + r with Q symmetrised on construction.
class SmoothQuadratic {
public:
  SmoothQuadratic(Matrix Q, Vector q, double r = 0.0) : q_(std::move(q)), r_(r) {
    if (Q.rows() != Q.cols())
      throw Error(ErrorKind::ValidationError, "Q must be square");
    require_dim(q_.size(), Q.rows(), "quadratic linear term");
    if (!Q.allFinite() || !q_.allFinite() || !std::isfinite(r))
      throw Error(ErrorKind::ValidationError, "quadratic data must be finite");
    Q_ = 0.5 * (Q + Q.transpose());
  }

  /// ½‖x − c‖².
  static SmoothQuadratic distance_to(const Vector &c) {
    return {Matrix::Identity(c.size(), c.size()), -c, 0.5 * c.squaredNorm()};
  }
  static SmoothQuadratic linear(const Vector &q) {
    return {Matrix::Zero(q.size(), q.size()), q, 0.0};
  }

  Index dimension() const { return q_.size(); }
  double value(const Vector &x) const { return 0.5 * x.dot(Q_ * x) + q_.dot(x) + r_; }
  Vector gradient(const Vector &x) const { return Q_ * x + q_; }
  Matrix hessian(const Vector &) const { return Q_; }

  const Matrix &Q() const { return Q_; }
  const Vector &q() const { return q_; }
  double r() const { return r_; }

  /// Multiplies f by s.
  SmoothQuadratic scaled(double s) const { return {s * Q_, s * q_, s * r_}; }

private:
  Matrix Q_;
  Vector q_;
  double r_;
};

static_assert(SmoothFunction<SmoothQuadratic>);

struct AffinePiece {
  Vector a;
  double b = 0.0;
};

/// g(x) = max_j ⟨a_j, x⟩ + b_j on its domain (0 when there are no pieces),
/// +∞ outside. The domain always carries the rows -x ≤ 0.
class PolyhedralFunction {
public:
  PolyhedralFunction(std::vector<AffinePiece> pieces, const Polyhedron &domain)
      : pieces_(std::move(pieces)), domain_(with_nonnegativity(domain)) {
    for (const auto &p : pieces_) {
      require_dim(p.a.size(), dimension(), "affine piece");
      if (!p.a.allFinite() || !std::isfinite(p.b))
        throw Error(ErrorKind::ValidationError, "affine pieces must be finite");
    }
    if (domain_.is_empty()) throw Error(ErrorKind::ValidationError, "empty domain");
  }

  static PolyhedralFunction indicator(const Polyhedron &domain) { return {{}, domain}; }
  static PolyhedralFunction nonnegative_indicator(Index n) {
    return indicator(Polyhedron(n));
  }
  static PolyhedralFunction simplex_indicator(Index n) {
    return indicator(Polyhedron::unit_simplex(n));
  }

  Index dimension() const { return domain_.dimension(); }
  const std::vector<AffinePiece> &pieces() const { return pieces_; }
  const Polyhedron &domain() const { return domain_; }
  bool is_indicator() const { return pieces_.empty(); }

  PolyhedralFunction scaled(double s) const {
    std::vector<AffinePiece> p = pieces_;
    for (auto &piece : p) {
      piece.a *= s;
      piece.b *= s;
    }
    return {std::move(p), domain_};
  }

  /// Value of the max-of-affine part, ignoring the domain.
  double piece_max(const Vector &x) const {
    if (pieces_.empty()) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &p : pieces_) best = std::max(best, p.a.dot(x) + p.b);
    return best;
  }

private:
  static Polyhedron with_nonnegativity(const Polyhedron &user) {
    const Index n = user.dimension();
    Polyhedron out = user;
    for (Index i = 0; i < n; ++i) {
      bool present = false;
      for (Index r = 0; r < user.A_ineq().rows() && !present; ++r) {
        // A row c·(-e_i) ≤ 0 with c > 0 is the same constraint.
        const auto row = user.A_ineq().row(r);
        if (user.b_ineq()(r) != 0.0 || row(i) >= 0.0) continue;
        bool only_i = true;
        for (Index k = 0; k < n; ++k)
          if (k != i && row(k) != 0.0) only_i = false;
        present = only_i;
      }
      if (!present) out.add_inequality(-Vector::Unit(n, i), 0.0);
    }
    return out;
  }

  std::vector<AffinePiece> pieces_;
  Polyhedron domain_;
};

/// g = ι of the nonnegative orthant: no pieces, no equalities, and only the
/// rows -x_i ≤ 0 (up to positive scaling).
inline bool is_orthant_indicator(const PolyhedralFunction &g) {
  if (!g.is_indicator() || g.domain().A_eq().rows() != 0) return false;
  const Matrix &A = g.domain().A_ineq();
  const Index n = g.dimension();
  for (Index r = 0; r < A.rows(); ++r) {
    if (g.domain().b_ineq()(r) != 0.0) return false;
    Index nz = 0;
    for (Index k = 0; k < n; ++k)
      if (A(r, k) != 0.0) {
        ++nz;
        if (A(r, k) > 0.0) return false;
      }
    if (nz != 1) return false;
  }
  return true;
}

/// g = ι of a scaled unit simplex {x ≥ 0, c·Σx = c}: the squared lift lives
/// on the unit sphere.
inline bool is_simplex_indicator(const PolyhedralFunction &g) {
  if (!g.is_indicator() || g.domain().A_eq().rows() != 1) return false;
  const Vector row = g.domain().A_eq().row(0).transpose();
  const double c = row(0);
  if (c == 0.0 || (row.array() != c).any() || g.domain().b_eq()(0) != c) return false;
  PolyhedralFunction orthant_part =
      PolyhedralFunction::indicator(Polyhedron(g.domain().A_ineq(), g.domain().b_ineq(),
                                               Matrix(0, g.dimension()), Vector(0)));
  return is_orthant_indicator(orthant_part);
}

template <SmoothFunction F = SmoothQuadratic>
class CompositeProblem {
public:
  CompositeProblem(F f, PolyhedralFunction g) : f_(std::move(f)), g_(std::move(g)) {
    if (f_.dimension() != g_.dimension())
      throw Error(ErrorKind::ValidationError, "f and g dimensions differ");
  }
  Index dimension() const { return g_.dimension(); }
  const F &f() const { return f_; }
  const PolyhedralFunction &g() const { return g_; }

private:
  F f_;
  PolyhedralFunction g_;
};

using QuadraticProblem = CompositeProblem<SmoothQuadratic>;

inline ExtendedReal g_eval(const PolyhedralFunction &g, const Vector &x,
                           double tau = tol::feasibility) {
  require_dim(x.size(), g.dimension(), "g_eval point");
  if (!g.domain().contains(x, tau)) return ExtendedReal::pos_inf();
  return ExtendedReal(g.piece_max(x));
}

template <SmoothFunction F>
ExtendedReal phi_eval(const CompositeProblem<F> &p, const Vector &x) {
  const ExtendedReal gv = g_eval(p.g(), x);
  if (!gv.is_finite()) return gv;
  return ExtendedReal(p.f().value(x) + gv.value());
}

struct SubdiffOptions {
  double domain_tol = tol::feasibility;
  double activity_tol = tol::activity;
};

struct Subdifferential {
  GeneratorSet set;
  /// Some activity gap lies in (tol, 10·tol]: the set may jump under perturbation.
  bool near_degenerate = false;
};

/// ∂g(x) = conv{a_j active} + cone{active inequality normals} + span{equality normals}.
inline Subdifferential g_subdiff_detail(const PolyhedralFunction &g, const Vector &x,
                                        const SubdiffOptions &opt = {}) {
  require_dim(x.size(), g.dimension(), "g_subdiff point");
  const Polyhedron &dom = g.domain();
  if (!dom.contains(x, opt.domain_tol))
    throw Error(ErrorKind::OutOfDomain, "point is outside dom g");
  const Index n = g.dimension();
  const double at = opt.activity_tol;
  Subdifferential out{GeneratorSet(n), false};
  auto near = [&](double gap) { return gap > at && gap <= 10.0 * at; };

  if (g.pieces().empty()) {
    out.set.add_point(Vector::Zero(n));
  } else {
    const double top = g.piece_max(x);
    for (const auto &p : g.pieces()) {
      const double gap = top - (p.a.dot(x) + p.b);
      if (gap <= at) out.set.add_point(p.a);
      out.near_degenerate |= near(gap);
    }
  }
  for (Index r = 0; r < dom.A_ineq().rows(); ++r) {
    const double slack = dom.b_ineq()(r) - dom.A_ineq().row(r).dot(x);
    if (slack <= at) out.set.add_ray(dom.A_ineq().row(r).transpose());
    out.near_degenerate |= near(slack);
  }
  for (Index r = 0; r < dom.A_eq().rows(); ++r)
    out.set.add_line(dom.A_eq().row(r).transpose());
  return out;
}

inline GeneratorSet g_subdiff(const PolyhedralFunction &g, const Vector &x,
                              const SubdiffOptions &opt = {}) {
  return g_subdiff_detail(g, x, opt).set;
}

/// ∂φ(x) = ∇f(x) + ∂g(x).
template <SmoothFunction F>
GeneratorSet phi_subdiff(const CompositeProblem<F> &p, const Vector &x,
                         const SubdiffOptions &opt = {}) {
  return g_subdiff(p.g(), x, opt).translated(p.f().gradient(x));
}

/// dist(0, ∂φ(x)).
template <SmoothFunction F>
double phi_residual(const CompositeProblem<F> &p, const Vector &x,
                    const SubdiffOptions &opt = {}) {
  const GeneratorSet s = phi_subdiff(p, x, opt);
  return min_norm_weighted(s, Vector::Zero(p.dimension()), Vector::Ones(p.dimension())).value;
}

/// Minimal-norm element of ∂φ(x).
template <SmoothFunction F>
Vector phi_min_norm_subgradient(const CompositeProblem<F> &p, const Vector &x,
                                const SubdiffOptions &opt = {}) {
  const GeneratorSet s = phi_subdiff(p, x, opt);
  return min_norm_weighted(s, Vector::Zero(p.dimension()), Vector::Ones(p.dimension()))
      .minimizer;
}

} // namespace sqlift
