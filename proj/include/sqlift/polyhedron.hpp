#pragma once

/// @file
/// Polyhedral sets in H-representation (Polyhedron) and V-representation
/// (GeneratorSet), with the LP/QP queries the rest of the library is built on.

#include "sqlift/lp.hpp"
#include "sqlift/qp.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sqlift {

/// {z : A_ineq z ≤ b_ineq, A_eq z = b_eq}.
class Polyhedron {
public:
  explicit Polyhedron(Index n) : n_(n), A_ineq_(0, n), b_ineq_(0), A_eq_(0, n), b_eq_(0) {
    if (n < 1) throw Error(ErrorKind::DimensionMismatch, "polyhedron dimension must be ≥ 1");
  }
  Polyhedron(Matrix A_ineq, Vector b_ineq, Matrix A_eq, Vector b_eq)
      : n_(std::max(A_ineq.cols(), A_eq.cols())), A_ineq_(std::move(A_ineq)),
        b_ineq_(std::move(b_ineq)), A_eq_(std::move(A_eq)), b_eq_(std::move(b_eq)) {
    if (n_ < 1) throw Error(ErrorKind::DimensionMismatch, "polyhedron dimension must be ≥ 1");
    if (A_ineq_.rows() == 0) A_ineq_.resize(0, n_);
    if (A_eq_.rows() == 0) A_eq_.resize(0, n_);
    require_dim(A_ineq_.cols(), n_, "polyhedron A_ineq columns");
    require_dim(A_eq_.cols(), n_, "polyhedron A_eq columns");
    require_dim(b_ineq_.size(), A_ineq_.rows(), "polyhedron b_ineq");
    require_dim(b_eq_.size(), A_eq_.rows(), "polyhedron b_eq");
    if (!A_ineq_.allFinite() || !b_ineq_.allFinite() || !A_eq_.allFinite() ||
        !b_eq_.allFinite())
      throw Error(ErrorKind::ValidationError, "polyhedron rows must be finite");
  }

  static Polyhedron nonnegative_orthant(Index n) {
    return Polyhedron(-Matrix::Identity(n, n), Vector::Zero(n), Matrix(0, n), Vector(0));
  }
  /// The unit simplex {z ≥ 0, Σz = 1}.
  static Polyhedron unit_simplex(Index n) {
    return Polyhedron(-Matrix::Identity(n, n), Vector::Zero(n), Matrix::Ones(1, n),
                      Vector::Ones(1));
  }

  Index dimension() const { return n_; }
  const Matrix &A_ineq() const { return A_ineq_; }
  const Vector &b_ineq() const { return b_ineq_; }
  const Matrix &A_eq() const { return A_eq_; }
  const Vector &b_eq() const { return b_eq_; }

  void add_inequality(const Vector &row, double rhs) {
    require_dim(row.size(), n_, "polyhedron row");
    A_ineq_.conservativeResize(A_ineq_.rows() + 1, Eigen::NoChange);
    A_ineq_.row(A_ineq_.rows() - 1) = row.transpose();
    b_ineq_.conservativeResize(b_ineq_.size() + 1);
    b_ineq_(b_ineq_.size() - 1) = rhs;
  }
  void add_equality(const Vector &row, double rhs) {
    require_dim(row.size(), n_, "polyhedron row");
    A_eq_.conservativeResize(A_eq_.rows() + 1, Eigen::NoChange);
    A_eq_.row(A_eq_.rows() - 1) = row.transpose();
    b_eq_.conservativeResize(b_eq_.size() + 1);
    b_eq_(b_eq_.size() - 1) = rhs;
  }

  /// Largest violation over all rows (0 if none).
  double max_violation(const Vector &z) const {
    require_dim(z.size(), n_, "polyhedron point");
    double v = 0.0;
    if (A_ineq_.rows() > 0) v = std::max(v, (A_ineq_ * z - b_ineq_).maxCoeff());
    if (A_eq_.rows() > 0) v = std::max(v, (A_eq_ * z - b_eq_).cwiseAbs().maxCoeff());
    return v;
  }
  bool contains(const Vector &z, double tau = tol::feasibility) const {
    return max_violation(z) <= tau;
  }

  /// A feasible point, or nullopt if the polyhedron is empty.
  std::optional<Vector> feasible_point() const {
    LPProblem lp = LPProblem::free_variables(n_);
    lp.A_ineq = A_ineq_;
    lp.b_ineq = b_ineq_;
    lp.A_eq = A_eq_;
    lp.b_eq = b_eq_;
    const LPOutcome out = lp_solve(lp);
    if (!out.optimal()) return std::nullopt;
    return out.witness;
  }
  bool is_empty() const { return !feasible_point().has_value(); }

private:
  Index n_;
  Matrix A_ineq_;
  Vector b_ineq_;
  Matrix A_eq_;
  Vector b_eq_;
};

/// conv(points) + cone(rays) + span(lines). Zero rays and lines are dropped
/// at construction; the set is empty iff there are no points.
class GeneratorSet {
public:
  explicit GeneratorSet(Index n) : n_(n) {}
  GeneratorSet(Index n, std::vector<Vector> points, std::vector<Vector> rays,
               std::vector<Vector> lines)
      : n_(n), points_(std::move(points)) {
    for (const auto &p : points_) require_dim(p.size(), n_, "generator point");
    for (auto &r : rays) add_ray(std::move(r));
    for (auto &l : lines) add_line(std::move(l));
  }

  Index dimension() const { return n_; }
  const std::vector<Vector> &points() const { return points_; }
  const std::vector<Vector> &rays() const { return rays_; }
  const std::vector<Vector> &lines() const { return lines_; }
  bool empty() const { return points_.empty(); }

  void add_point(Vector p) {
    require_dim(p.size(), n_, "generator point");
    points_.push_back(std::move(p));
  }
  void add_ray(Vector r) {
    require_dim(r.size(), n_, "generator ray");
    if (r.cwiseAbs().maxCoeff() > 0.0) rays_.push_back(std::move(r));
  }
  void add_line(Vector l) {
    require_dim(l.size(), n_, "generator line");
    if (l.cwiseAbs().maxCoeff() > 0.0) lines_.push_back(std::move(l));
  }

  /// The same set translated by `shift`.
  GeneratorSet translated(const Vector &shift) const {
    GeneratorSet out = *this;
    for (auto &p : out.points_) p += shift;
    return out;
  }

  Index num_points() const { return static_cast<Index>(points_.size()); }
  Index num_rays() const { return static_cast<Index>(rays_.size()); }
  Index num_lines() const { return static_cast<Index>(lines_.size()); }
  Index num_coefficients() const { return num_points() + num_rays() + num_lines(); }

  /// Columns [points | rays | lines]; z = M c for coefficient vector c.
  Matrix generator_matrix() const {
    Matrix M(n_, num_coefficients());
    Index k = 0;
    for (const auto &p : points_) M.col(k++) = p;
    for (const auto &r : rays_) M.col(k++) = r;
    for (const auto &l : lines_) M.col(k++) = l;
    return M;
  }

  /// An element built from explicit coefficients (λ normalised to the simplex
  /// by the caller).
  Vector combine(const Vector &coefficients) const {
    require_dim(coefficients.size(), num_coefficients(), "generator coefficients");
    return generator_matrix() * coefficients;
  }

private:
  Index n_;
  std::vector<Vector> points_;
  std::vector<Vector> rays_;
  std::vector<Vector> lines_;
};

/// LP over the coefficient space of a GeneratorSet: λ ≥ 0 with Σλ = 1,
/// μ ≥ 0, ν free, plus linear rows stated in terms of the element z = M c.
class CoefficientLP {
public:
  explicit CoefficientLP(const GeneratorSet &set)
      : set_(set), M_(set.generator_matrix()),
        lp_(LPProblem::free_variables(set.num_coefficients())) {
    if (set.empty()) throw Error(ErrorKind::EmptySet, "generator set has no points");
    const Index np = set.num_points(), nr = set.num_rays();
    lp_.lower.head(np + nr).setZero();
    Vector simplex = Vector::Zero(set.num_coefficients());
    simplex.head(np).setOnes();
    lp_.add_equality(simplex, 1.0);
  }

  /// ⟨row, z⟩ = rhs.
  void element_equals(const Vector &row, double rhs) {
    require_dim(row.size(), set_.dimension(), "element row");
    lp_.add_equality(M_.transpose() * row, rhs);
  }
  /// ⟨row, z⟩ ≤ rhs.
  void element_at_most(const Vector &row, double rhs) {
    require_dim(row.size(), set_.dimension(), "element row");
    lp_.add_inequality(M_.transpose() * row, rhs);
  }
  void maximize_element(const Vector &direction) {
    require_dim(direction.size(), set_.dimension(), "objective");
    lp_.objective = M_.transpose() * direction;
  }
  void maximize_coefficients(const Vector &weights) {
    require_dim(weights.size(), set_.num_coefficients(), "coefficient objective");
    lp_.objective = weights;
  }

  struct Result {
    LPOutcome outcome;
    std::optional<Vector> element;
  };
  Result solve(const LPOptions &opt = {}) const {
    Result r{lp_solve(lp_, opt), std::nullopt};
    if (r.outcome.optimal()) r.element = M_ * *r.outcome.witness;
    return r;
  }

  const LPProblem &problem() const { return lp_; }

private:
  const GeneratorSet &set_;
  Matrix M_;
  LPProblem lp_;
};

struct MinNormResult {
  double value = 0.0;
  Vector minimizer;    // z ∈ S attaining the value
  Vector coefficients; // [λ | μ | ν]
  double stationarity = 0.0;
};

/// min over z ∈ S of ‖weights ∘ (shift + z)‖, solved as an active-set QP in
/// coefficient space. Coordinates with zero weight do not affect the value.
inline MinNormResult min_norm_weighted(const GeneratorSet &S, const Vector &shift,
                                       const Vector &weights,
                                       const QPOptions &opt = {}) {
  const Index n = S.dimension();
  require_dim(shift.size(), n, "min_norm shift");
  require_dim(weights.size(), n, "min_norm weights");
  if (S.empty()) throw Error(ErrorKind::EmptySet, "min_norm_weighted on an empty set");
  if ((weights.array() < 0).any())
    throw Error(ErrorKind::InvalidRange, "min_norm_weighted: negative weight");

  const Index np = S.num_points(), nr = S.num_rays(), nl = S.num_lines();
  const Index nc = np + nr + nl;
  const Matrix M = S.generator_matrix();
  const Matrix WM = weights.asDiagonal() * M;
  const Vector Ws = weights.cwiseProduct(shift);

  // Start at the best point generator, with lines at their least-squares optimum.
  Vector c = Vector::Zero(nc);
  Index best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < np; ++j) {
    const double v = (Ws + WM.col(j)).norm();
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  c(best) = 1.0;
  if (nl > 0) {
    const Matrix WL = WM.rightCols(nl);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(WL);
    c.tail(nl) = cod.solve(-(Ws + WM.col(best)));
  }

  QPProblem qp;
  qp.G = WM.transpose() * WM;
  qp.g = WM.transpose() * Ws;
  qp.A_eq = Matrix::Zero(1, nc);
  qp.A_eq.block(0, 0, 1, np).setOnes();
  qp.b_eq = Vector::Ones(1);
  qp.A_ineq = Matrix::Zero(np + nr, nc);
  qp.A_ineq.block(0, 0, np + nr, np + nr) = -Matrix::Identity(np + nr, np + nr);
  qp.b_ineq = Vector::Zero(np + nr);

  QPResult r = qp_solve_active_set(qp, c, opt);
  // Clean up roundoff in the sign constraints and the simplex row.
  Vector coef = r.x;
  for (Index j = 0; j < np + nr; ++j) coef(j) = std::max(0.0, coef(j));
  const double lam_sum = coef.head(np).sum();
  if (lam_sum > 0) coef.head(np) /= lam_sum;

  MinNormResult out;
  out.coefficients = coef;
  out.minimizer = M * coef;
  out.value = weights.cwiseProduct(shift + out.minimizer).norm();
  out.stationarity = r.stationarity;
  return out;
}

/// True iff dist(z, S) ≤ tol.
inline bool vrep_membership(const GeneratorSet &S, const Vector &z,
                            double tol = tol::feasibility) {
  require_dim(z.size(), S.dimension(), "membership point");
  if (S.empty()) return false;
  return min_norm_weighted(S, -z, Vector::Ones(S.dimension())).value <= tol;
}

/// Optimal t of   max t  s.t.  z = Σλp + Σμr + Σνℓ, Σλ = 1, λ ≥ t, μ ≥ t,  t ≤ 1.
/// Returns -∞ if z ∉ S.
inline ExtendedReal vrep_ri_margin(const GeneratorSet &S, const Vector &z) {
  require_dim(z.size(), S.dimension(), "ri point");
  if (S.empty()) throw Error(ErrorKind::EmptySet, "ri membership on an empty set");
  const Index n = S.dimension();
  const Index np = S.num_points(), nr = S.num_rays(), nl = S.num_lines();
  const Index nc = np + nr + nl;
  const Matrix M = S.generator_matrix();

  // Variables [c | t].
  LPProblem lp = LPProblem::free_variables(nc + 1);
  lp.objective(nc) = 1.0;
  lp.upper(nc) = 1.0;
  Matrix Aeq = Matrix::Zero(n + 1, nc + 1);
  Aeq.block(0, 0, n, nc) = M;
  Aeq.block(n, 0, 1, np).setOnes();
  Vector beq(n + 1);
  beq.head(n) = z;
  beq(n) = 1.0;
  lp.A_eq = Aeq;
  lp.b_eq = beq;
  Matrix Ain = Matrix::Zero(np + nr, nc + 1);
  for (Index j = 0; j < np + nr; ++j) {
    Ain(j, j) = -1.0;
    Ain(j, nc) = 1.0;
  }
  lp.A_ineq = Ain;
  lp.b_ineq = Vector::Zero(np + nr);
  const LPOutcome out = lp_solve(lp);
  if (!out.optimal()) return ExtendedReal::neg_inf();
  return out.value;
}

/// z ∈ ri(S): some representation has every point and ray coefficient > tol.
inline bool vrep_ri_membership(const GeneratorSet &S, const Vector &z,
                               double tol = tol::ri_positivity) {
  const ExtendedReal t = vrep_ri_margin(S, z);
  return t.is_finite() && t.value() > tol;
}

/// σ_S(w) = sup over z ∈ S of ⟨z, w⟩.
inline ExtendedReal vrep_support(const GeneratorSet &S, const Vector &w) {
  require_dim(w.size(), S.dimension(), "support direction");
  if (S.empty()) throw Error(ErrorKind::EmptySet, "support function of an empty set");
  const double wn = w.norm();
  for (const auto &r : S.rays())
    if (r.dot(w) > 1e-14 * r.norm() * wn) return ExtendedReal::pos_inf();
  for (const auto &l : S.lines())
    if (std::abs(l.dot(w)) > 1e-14 * l.norm() * wn) return ExtendedReal::pos_inf();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto &p : S.points()) best = std::max(best, p.dot(w));
  return ExtendedReal(best);
}

/// Euclidean projection onto a nonempty polyhedron.
inline Vector project_onto_polyhedron(const Polyhedron &P, const Vector &x,
                                      const QPOptions &opt = {}) {
  require_dim(x.size(), P.dimension(), "projection point");
  if (P.contains(x, 0.0)) return x;
  const auto start = P.feasible_point();
  if (!start) throw Error(ErrorKind::InfeasiblePolyhedron, "projection onto an empty polyhedron");
  QPProblem qp;
  const Index n = P.dimension();
  qp.G = Matrix::Identity(n, n);
  qp.g = -x;
  qp.A_eq = P.A_eq();
  qp.b_eq = P.b_eq();
  qp.A_ineq = P.A_ineq();
  qp.b_ineq = P.b_ineq();
  return qp_solve_active_set(qp, *start, opt).x;
}

} // namespace sqlift
