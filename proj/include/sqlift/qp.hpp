#pragma once

/// @file
/// Primal active-set method for small convex quadratic programs
///
///     minimize ½⟨c, G c⟩ + ⟨g, c⟩   s.t.  A_eq c = b_eq,  A_ineq c ≤ b_ineq
///
/// with G positive semidefinite. The equality-constrained subproblems are
/// solved through a complete orthogonal decomposition of the KKT matrix, which
/// returns the minimum-norm step when G is singular on the working subspace.
/// The caller supplies a feasible starting point.

#include "sqlift/core.hpp"

#include <algorithm>
#include <vector>

namespace sqlift {

struct QPProblem {
  Matrix G;
  Vector g;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ineq;
  Vector b_ineq;
};

struct QPOptions {
  double feasibility_tol = tol::feasibility;
  double multiplier_tol = 1e-12;
  double step_tol = 1e-13;
  int max_iterations = 5000;
};

struct QPResult {
  Vector x;
  double objective = 0.0;
  Vector multipliers_eq;
  Vector multipliers_ineq;
  /// ∞-norm of the Lagrangian gradient at the returned point.
  double stationarity = 0.0;
  int iterations = 0;
};

namespace detail {

inline bool row_independent(const Matrix &rows, const Vector &candidate) {
  Matrix stacked(rows.rows() + 1, candidate.size());
  if (rows.rows() > 0) stacked.topRows(rows.rows()) = rows;
  stacked.row(rows.rows()) = candidate.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(stacked.transpose());
  qr.setThreshold(1e-10);
  return qr.rank() == stacked.rows();
}

} // namespace detail

inline QPResult qp_solve_active_set(const QPProblem &qp, const Vector &start,
                                    const QPOptions &opt = {}) {
  const Index n = qp.G.rows();
  require_dim(qp.G.cols(), n, "qp G");
  require_dim(qp.g.size(), n, "qp g");
  require_dim(start.size(), n, "qp start");
  require_dim(qp.A_eq.cols(), n, "qp A_eq");
  require_dim(qp.A_ineq.cols(), n, "qp A_ineq");
  const Index me = qp.A_eq.rows(), mi = qp.A_ineq.rows();

  Vector x = start;
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  {
    double viol = 0.0;
    if (me > 0) viol = std::max(viol, (qp.A_eq * x - qp.b_eq).cwiseAbs().maxCoeff());
    if (mi > 0) viol = std::max(viol, (qp.A_ineq * x - qp.b_ineq).maxCoeff());
    if (viol > 1e3 * opt.feasibility_tol * scale)
      throw Error(ErrorKind::InvalidRange, "QP start point is infeasible");
  }

  // Working set: independent equality rows, then active inequality rows.
  std::vector<Index> eq_rows, working;
  Matrix W(0, n);
  auto push_row = [&](const Vector &row) {
    W.conservativeResize(W.rows() + 1, Eigen::NoChange);
    W.row(W.rows() - 1) = row.transpose();
  };
  for (Index i = 0; i < me; ++i) {
    if (detail::row_independent(W, qp.A_eq.row(i).transpose())) {
      eq_rows.push_back(i);
      push_row(qp.A_eq.row(i).transpose());
    }
  }
  for (Index i = 0; i < mi; ++i) {
    const double slack = qp.b_ineq(i) - qp.A_ineq.row(i).dot(x);
    if (slack <= opt.feasibility_tol * (1.0 + std::abs(qp.b_ineq(i))) &&
        detail::row_independent(W, qp.A_ineq.row(i).transpose())) {
      working.push_back(i);
      push_row(qp.A_ineq.row(i).transpose());
    }
  }

  auto rebuild = [&]() {
    W.resize(0, n);
    for (Index i : eq_rows) push_row(qp.A_eq.row(i).transpose());
    for (Index i : working) push_row(qp.A_ineq.row(i).transpose());
  };

  QPResult res;
  Vector mult_w;
  bool degenerate = false;
  // Set after an unblocked full step: x then minimizes over the working set.
  bool subspace_min = false;
  while (true) {
    if (++res.iterations > opt.max_iterations)
      throw Error(ErrorKind::NumericalFailure, "active-set QP iteration cap reached");
    const Index k = W.rows();
    Matrix K = Matrix::Zero(n + k, n + k);
    K.topLeftCorner(n, n) = qp.G;
    K.topRightCorner(n, k) = W.transpose();
    K.bottomLeftCorner(k, n) = W;
    Vector rhs = Vector::Zero(n + k);
    rhs.head(n) = -(qp.G * x + qp.g);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    cod.setThreshold(1e-13);
    const Vector sol = cod.solve(rhs);
    const double kkt_err = (K * sol - rhs).cwiseAbs().maxCoeff();
    if (kkt_err > 1e-7 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::NumericalFailure,
                  "QP subproblem inconsistent (objective unbounded on working set?)");
    Vector p = sol.head(n);
    mult_w = sol.tail(k);

    if (subspace_min || p.cwiseAbs().maxCoeff() <= opt.step_tol * scale) {
      subspace_min = false;
      // Stationary on the working set: check inequality multipliers.
      // After a zero step the smallest-index rule replaces the most negative one.
      Index drop = -1;
      double most_negative = -opt.multiplier_tol;
      const Index ne = static_cast<Index>(eq_rows.size());
      for (Index j = 0; j < static_cast<Index>(working.size()); ++j) {
        const double m = mult_w(ne + j);
        if (m >= -opt.multiplier_tol) continue;
        if (degenerate ? (drop < 0 || working[j] < working[drop]) : m < most_negative) {
          most_negative = m;
          drop = j;
        }
      }
      if (drop < 0) break;
      working.erase(working.begin() + drop);
      rebuild();
      continue;
    }

    // Longest feasible step along p.
    double alpha = 1.0;
    Index blocking = -1;
    for (Index i = 0; i < mi; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double ap = qp.A_ineq.row(i).dot(p);
      if (ap <= 1e-14 * (1.0 + p.cwiseAbs().maxCoeff())) continue;
      const double slack = std::max(0.0, qp.b_ineq(i) - qp.A_ineq.row(i).dot(x));
      const double a = slack / ap;
      if (a < alpha - 1e-15) {
        alpha = a;
        blocking = i;
      }
    }
    degenerate = blocking >= 0 && alpha * p.cwiseAbs().maxCoeff() <= opt.step_tol * scale;
    x += alpha * p;
    subspace_min = blocking < 0;
    if (blocking >= 0) {
      working.push_back(blocking);
      rebuild();
    }
  }

  res.x = x;
  res.objective = 0.5 * x.dot(qp.G * x) + qp.g.dot(x);
  res.multipliers_eq = Vector::Zero(me);
  res.multipliers_ineq = Vector::Zero(mi);
  const Index ne = static_cast<Index>(eq_rows.size());
  for (Index j = 0; j < ne; ++j) res.multipliers_eq(eq_rows[j]) = mult_w(j);
  for (Index j = 0; j < static_cast<Index>(working.size()); ++j)
    res.multipliers_ineq(working[j]) = mult_w(ne + j);
  Vector lag = qp.G * x + qp.g;
  if (me > 0) lag += qp.A_eq.transpose() * res.multipliers_eq;
  if (mi > 0) lag += qp.A_ineq.transpose() * res.multipliers_ineq;
  res.stationarity = lag.size() ? lag.cwiseAbs().maxCoeff() : 0.0;
  return res;
}

} // namespace sqlift
