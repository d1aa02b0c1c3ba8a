#pragma once

/// @file
/// The squared lift Φ(y) = f(y²) + g(y²) and its first-order residual.
///
/// dist(0, ∂Φ(y)) is never computed from ∂Φ itself. It is evaluated in
/// x-space as 2·min over z ∈ ∂g(y²) of ‖y ∘ (∇f(y²) + z)‖.

#include "sqlift/polyfunc.hpp"

#include <optional>
#include <vector>

namespace sqlift {

struct SupportSplit {
  std::vector<Index> support;    // |y_i| > tol
  std::vector<Index> complement; // the rest
};

inline SupportSplit support_set(const Vector &y, double tol_support = tol::support) {
  SupportSplit s;
  for (Index i = 0; i < y.size(); ++i)
    (std::abs(y(i)) > tol_support ? s.support : s.complement).push_back(i);
  return s;
}

/// 0/1 indicator of the support as a vector.
inline Vector support_mask(const SupportSplit &s, Index n) {
  Vector m = Vector::Zero(n);
  for (Index i : s.support) m(i) = 1.0;
  return m;
}

struct LiftedPoint {
  Vector y;
  Vector x;
  SupportSplit split;
  bool in_domain = false;
};

template <SmoothFunction F>
LiftedPoint lift_point(const CompositeProblem<F> &p, const Vector &y,
                       double tol_support = tol::support) {
  require_dim(y.size(), p.dimension(), "lifted point");
  LiftedPoint lp{y, y.cwiseProduct(y), support_set(y, tol_support), false};
  lp.in_domain = p.g().domain().contains(lp.x);
  return lp;
}

/// Φ(y) = φ(y²); +∞ iff y² ∉ dom g.
template <SmoothFunction F>
ExtendedReal lift_eval(const CompositeProblem<F> &p, const Vector &y) {
  require_dim(y.size(), p.dimension(), "lift_eval point");
  return phi_eval(p, Vector(y.cwiseProduct(y)));
}

struct LiftedResidual {
  double value = 0.0;
  /// z* ∈ ∂g(y²) attaining the inner minimum.
  Vector inner_minimizer;
};

template <SmoothFunction F>
LiftedResidual lifted_residual_detail(const CompositeProblem<F> &p, const Vector &y,
                                      const SubdiffOptions &opt = {}) {
  require_dim(y.size(), p.dimension(), "lifted_residual point");
  const Vector x = y.cwiseProduct(y);
  if (!p.g().domain().contains(x, opt.domain_tol))
    throw Error(ErrorKind::OutOfLiftedDomain, "y² is outside dom g");
  const GeneratorSet dg = g_subdiff(p.g(), x, opt);
  const MinNormResult mn = min_norm_weighted(dg, p.f().gradient(x), y.cwiseAbs());
  return {2.0 * mn.value, mn.minimizer};
}

/// dist(0, ∂Φ(y)).
template <SmoothFunction F>
double lifted_residual(const CompositeProblem<F> &p, const Vector &y,
                       const SubdiffOptions &opt = {}) {
  return lifted_residual_detail(p, y, opt).value;
}

struct StationarityReport {
  bool in_domain = false;
  SupportSplit split;
  std::optional<double> lifted_residual;
  std::optional<double> phi_residual;
  bool stationary_for_Phi = false;
  bool stationary_for_phi = false;
  /// min over the support of |y_i|; conclusions that depend on the support are
  /// only reliable when this is far above tol_support.
  std::optional<double> min_abs_on_support;
  bool near_degenerate = false;
};

template <SmoothFunction F>
StationarityReport classify_first_order(const CompositeProblem<F> &p, const Vector &y,
                                        double tol = tol::stationarity,
                                        double tol_support = tol::support) {
  const LiftedPoint lp = lift_point(p, y, tol_support);
  StationarityReport r;
  r.in_domain = lp.in_domain;
  r.split = lp.split;
  for (Index i : lp.split.support) {
    const double a = std::abs(y(i));
    r.min_abs_on_support = r.min_abs_on_support ? std::min(*r.min_abs_on_support, a) : a;
  }
  if (!lp.in_domain) return r;
  r.near_degenerate = g_subdiff_detail(p.g(), lp.x).near_degenerate;
  r.lifted_residual = lifted_residual(p, y);
  r.phi_residual = phi_residual(p, lp.x);
  r.stationary_for_Phi = *r.lifted_residual <= tol;
  r.stationary_for_phi = *r.phi_residual <= tol;
  return r;
}

} // namespace sqlift
