#pragma once

/// @file
/// Dense two-phase primal simplex for desk-scale linear programs.
///
/// Solves   maximize ⟨c, z⟩
///          s.t. A_eq z = b_eq, A_ineq z ≤ b_ineq, lower ≤ z ≤ upper
/// where bounds may be ±∞. Pivoting uses Bland's smallest-index rule in both
/// phases, so identical input always yields the identical basis and witness.

#include "sqlift/core.hpp"

#include <optional>
#include <vector>

namespace sqlift {

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline std::string_view to_string(LPStatus s) {
  switch (s) {
  case LPStatus::Optimal: return "Optimal";
  case LPStatus::Infeasible: return "Infeasible";
  case LPStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

struct LPProblem {
  Vector objective;
  Vector lower;
  Vector upper;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ineq;
  Vector b_ineq;

  /// Free variables, no rows, zero objective.
  static LPProblem free_variables(Index n) {
    LPProblem lp;
    lp.objective = Vector::Zero(n);
    lp.lower = Vector::Constant(n, -std::numeric_limits<double>::infinity());
    lp.upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
    lp.A_eq.resize(0, n);
    lp.b_eq.resize(0);
    lp.A_ineq.resize(0, n);
    lp.b_ineq.resize(0);
    return lp;
  }

  Index dimension() const { return objective.size(); }

  void add_equality(const Vector &row, double rhs) {
    A_eq.conservativeResize(A_eq.rows() + 1, Eigen::NoChange);
    A_eq.row(A_eq.rows() - 1) = row.transpose();
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq(b_eq.size() - 1) = rhs;
  }
  void add_inequality(const Vector &row, double rhs) {
    A_ineq.conservativeResize(A_ineq.rows() + 1, Eigen::NoChange);
    A_ineq.row(A_ineq.rows() - 1) = row.transpose();
    b_ineq.conservativeResize(b_ineq.size() + 1);
    b_ineq(b_ineq.size() - 1) = rhs;
  }
};

struct LPOptions {
  double feasibility_tol = tol::feasibility;
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-11;
  int max_iterations = 20000;
};

struct LPOutcome {
  LPStatus status = LPStatus::Infeasible;
  /// max value; -∞ when infeasible, +∞ when unbounded.
  ExtendedReal value = ExtendedReal::neg_inf();
  /// Present iff status == Optimal.
  std::optional<Vector> witness;
  /// Dual objective reconstructed from the final basis (Optimal only).
  double dual_value = std::numeric_limits<double>::quiet_NaN();
  /// Largest violation of dual feasibility (reduced-cost sign) at the end.
  double dual_infeasibility = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;

  bool optimal() const { return status == LPStatus::Optimal; }
};

namespace detail {

/// z = offset + transform * x, x ≥ 0.
struct StandardForm {
  Matrix A;
  Vector b;
  Vector cost;
  Vector offset;
  Matrix transform;
  double cost_offset = 0.0;
};

inline StandardForm to_standard_form(const LPProblem &lp) {
  const Index n = lp.dimension();
  const double inf = std::numeric_limits<double>::infinity();

  // Column layout of the transformed variables.
  std::vector<std::pair<Index, double>> columns; // (original var, sign)
  std::vector<std::pair<Index, double>> box_rows; // (column, width)
  Vector offset = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (lo > hi)
      throw Error(ErrorKind::DimensionMismatch, "lower bound exceeds upper bound");
    if (lo > -inf) {
      offset(j) = lo;
      columns.emplace_back(j, 1.0);
      if (hi < inf)
        box_rows.emplace_back(static_cast<Index>(columns.size()) - 1, hi - lo);
    } else if (hi < inf) {
      offset(j) = hi;
      columns.emplace_back(j, -1.0);
    } else {
      columns.emplace_back(j, 1.0);
      columns.emplace_back(j, -1.0);
    }
  }
  const Index n_struct = static_cast<Index>(columns.size());
  Matrix transform = Matrix::Zero(n, n_struct);
  for (Index k = 0; k < n_struct; ++k)
    transform(columns[k].first, k) = columns[k].second;

  const Index m_eq = lp.A_eq.rows();
  const Index m_in = lp.A_ineq.rows();
  const Index m_box = static_cast<Index>(box_rows.size());
  const Index n_slack = m_in + m_box;
  const Index m = m_eq + m_in + m_box;

  StandardForm sf;
  sf.A = Matrix::Zero(m, n_struct + n_slack);
  sf.b = Vector::Zero(m);
  if (m_eq > 0) {
    sf.A.block(0, 0, m_eq, n_struct) = lp.A_eq * transform;
    sf.b.head(m_eq) = lp.b_eq - lp.A_eq * offset;
  }
  if (m_in > 0) {
    sf.A.block(m_eq, 0, m_in, n_struct) = lp.A_ineq * transform;
    sf.A.block(m_eq, n_struct, m_in, m_in).setIdentity();
    sf.b.segment(m_eq, m_in) = lp.b_ineq - lp.A_ineq * offset;
  }
  for (Index r = 0; r < m_box; ++r) {
    sf.A(m_eq + m_in + r, box_rows[r].first) = 1.0;
    sf.A(m_eq + m_in + r, n_struct + m_in + r) = 1.0;
    sf.b(m_eq + m_in + r) = box_rows[r].second;
  }
  sf.cost = Vector::Zero(n_struct + n_slack);
  sf.cost.head(n_struct) = transform.transpose() * lp.objective;
  sf.cost_offset = lp.objective.dot(offset);
  sf.offset = std::move(offset);
  sf.transform = Matrix::Zero(n, n_struct + n_slack);
  sf.transform.leftCols(n_struct) = transform;
  return sf;
}

class Tableau {
public:
  Tableau(const Matrix &A, const Vector &b, const LPOptions &opt)
      : m_(A.rows()), n_(A.cols()), opt_(opt) {
    // Columns: structural+slack (n_), artificial (m_), rhs.
    t_ = Matrix::Zero(m_, n_ + m_ + 1);
    for (Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, n_ + m_) = sign * b(i);
    }
    basis_.resize(m_);
    for (Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    row_alive_.assign(m_, true);
  }

  /// Maximizes cost·x over the allowed columns. Returns false if unbounded.
  bool optimize(const Vector &cost, Index allowed_cols, int &iterations) {
    while (true) {
      if (++iterations > opt_.max_iterations)
        throw Error(ErrorKind::NumericalFailure,
                    "simplex iteration cap reached (degenerate cycling?)");
      // Bland: smallest index with positive reduced cost.
      Index entering = -1;
      for (Index j = 0; j < allowed_cols; ++j) {
        if (is_basic(j)) continue;
        if (reduced_cost(cost, j) > opt_.optimality_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return true;
      // Ratio test, ties broken by smallest basic index.
      Index leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        if (!row_alive_[i]) continue;
        const double a = t_(i, entering);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = std::max(0.0, rhs(i)) / a;
        if (leaving < 0 || ratio < best - 1e-14) {
          best = ratio;
          leaving = i;
        } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leaving]) {
          best = std::min(best, ratio);
          leaving = i;
        }
      }
      if (leaving < 0) return false;
      pivot(leaving, entering);
    }
  }

  double reduced_cost(const Vector &cost, Index j) const {
    double r = cost(j);
    for (Index i = 0; i < m_; ++i)
      if (row_alive_[i]) r -= cost(basis_[i]) * t_(i, j);
    return r;
  }

  /// Drive artificial variables out of the basis after phase one; rows with
  /// no usable pivot are redundant and are retired.
  void expel_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (!row_alive_[i] || basis_[i] < n_) continue;
      Index col = -1;
      for (Index j = 0; j < n_; ++j) {
        if (!is_basic(j) && std::abs(t_(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0)
        pivot(i, col);
      else
        row_alive_[i] = false;
    }
  }

  double rhs(Index i) const { return t_(i, n_ + m_); }
  Index rows() const { return m_; }
  Index basic(Index i) const { return basis_[i]; }
  bool alive(Index i) const { return row_alive_[i]; }

  Vector solution(Index ncols) const {
    Vector x = Vector::Zero(ncols);
    for (Index i = 0; i < m_; ++i)
      if (row_alive_[i] && basis_[i] < ncols) x(basis_[i]) = std::max(0.0, rhs(i));
    return x;
  }

private:
  bool is_basic(Index j) const {
    for (Index i = 0; i < m_; ++i)
      if (row_alive_[i] && basis_[i] == j) return true;
    return false;
  }

  void pivot(Index r, Index s) {
    const double p = t_(r, s);
    t_.row(r) /= p;
    t_(r, s) = 1.0;
    for (Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, s);
      if (f != 0.0) {
        t_.row(i) -= f * t_.row(r);
        t_(i, s) = 0.0;
      }
    }
    basis_[r] = s;
  }

  Index m_, n_;
  LPOptions opt_;
  Matrix t_;
  std::vector<Index> basis_;
  std::vector<bool> row_alive_;
};

} // namespace detail

inline LPOutcome lp_solve(const LPProblem &lp, const LPOptions &opt = {}) {
  const Index n = lp.dimension();
  require_dim(lp.lower.size(), n, "lp_solve lower bounds");
  require_dim(lp.upper.size(), n, "lp_solve upper bounds");
  require_dim(lp.A_eq.cols(), n, "lp_solve A_eq columns");
  require_dim(lp.b_eq.size(), lp.A_eq.rows(), "lp_solve b_eq");
  require_dim(lp.A_ineq.cols(), n, "lp_solve A_ineq columns");
  require_dim(lp.b_ineq.size(), lp.A_ineq.rows(), "lp_solve b_ineq");
  if (!lp.objective.allFinite() || !lp.A_eq.allFinite() || !lp.b_eq.allFinite() ||
      !lp.A_ineq.allFinite() || !lp.b_ineq.allFinite())
    throw Error(ErrorKind::NumericalFailure, "lp_solve: non-finite data");

  const detail::StandardForm sf = detail::to_standard_form(lp);
  const Index m = sf.A.rows();
  const Index ncols = sf.A.cols();
  detail::Tableau tab(sf.A, sf.b, opt);
  LPOutcome out;

  // Phase one: maximize -Σ artificials.
  Vector phase1 = Vector::Zero(ncols + m);
  phase1.tail(m).setConstant(-1.0);
  tab.optimize(phase1, ncols + m, out.iterations);
  double infeas = 0.0;
  for (Index i = 0; i < m; ++i)
    if (tab.basic(i) >= ncols) infeas += std::abs(tab.rhs(i));
  const double scale = 1.0 + (m > 0 ? sf.b.cwiseAbs().maxCoeff() : 0.0);
  if (infeas > opt.feasibility_tol * scale) {
    out.status = LPStatus::Infeasible;
    return out;
  }
  tab.expel_artificials();

  // Phase two over structural and slack columns only.
  Vector phase2 = Vector::Zero(ncols + m);
  phase2.head(ncols) = sf.cost;
  if (!tab.optimize(phase2, ncols, out.iterations)) {
    out.status = LPStatus::Unbounded;
    out.value = ExtendedReal::pos_inf();
    return out;
  }

  const Vector x = tab.solution(ncols);
  Vector z = sf.offset + sf.transform * x;
  out.status = LPStatus::Optimal;
  out.value = ExtendedReal(lp.objective.dot(z));

  // Dual from the final basis: y = B^{-T} c_B over the surviving rows.
  std::vector<Index> rows, cols;
  for (Index i = 0; i < m; ++i)
    if (tab.alive(i)) {
      rows.push_back(i);
      cols.push_back(tab.basic(i));
    }
  const Index mk = static_cast<Index>(rows.size());
  if (mk == 0) {
    out.dual_value = sf.cost_offset;
    out.dual_infeasibility = std::max(0.0, ncols > 0 ? sf.cost.maxCoeff() : 0.0);
  } else {
    Matrix B(mk, mk), Ak(mk, ncols);
    Vector bk(mk), cB(mk);
    for (Index r = 0; r < mk; ++r) {
      Ak.row(r) = sf.A.row(rows[r]);
      bk(r) = sf.b(rows[r]);
      cB(r) = sf.cost(cols[r]);
    }
    for (Index r = 0; r < mk; ++r) B.col(r) = Ak.col(cols[r]);
    const Vector y = B.transpose().fullPivLu().solve(cB);
    out.dual_value = bk.dot(y) + sf.cost_offset;
    const Vector reduced = sf.cost - Ak.transpose() * y;
    out.dual_infeasibility = std::max(0.0, reduced.maxCoeff());
  }
  out.witness = std::move(z);
  return out;
}

} // namespace sqlift
