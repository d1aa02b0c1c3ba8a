#pragma once

/// @file
/// Second subderivative of the lifted problem on S_I = {w : w_I = 0} and the
/// certificate that decides whether a stationary point of Φ maps to a
/// stationary point of φ.
///
/// For v ∈ ∂g(ȳ²), λ = 2ȳ∘v and w ∈ S_I,
///   d²(g∘T)(ȳ|λ)(w) = 2 · sup { ⟨w²_{I^c}, p_{I^c}⟩ : p ∈ ∂g(ȳ²), p_I = v_I },
/// an LP over the generator coefficients of ∂g(ȳ²).

#include "sqlift/reparam.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace sqlift {

struct Multiplier {
  Vector v;      // element of ∂g(x) with v_I = -∇f(x)_I
  Vector lambda; // 2y ∘ v
};

struct MultiplierOptions {
  double tol_support = tol::support;
  /// Allowed deviation |v_i + ∇f(x)_i| on the support, per coordinate. Empty
  /// means a uniform feasibility tolerance.
  std::optional<Vector> slack;
};

namespace detail {

/// {v ∈ ∂g(x) : |v_i + ∇f(x)_i| ≤ slack_i, i ∈ I} with a vertex-selecting objective.
template <SmoothFunction F>
std::optional<Vector> multiplier_lp(const CompositeProblem<F> &p, const Vector &y,
                                    const MultiplierOptions &opt, double orientation,
                                    const Vector *pin = nullptr) {
  const Index n = p.dimension();
  const Vector x = y.cwiseProduct(y);
  if (!p.g().domain().contains(x))
    throw Error(ErrorKind::OutOfLiftedDomain, "y² is outside dom g");
  const GeneratorSet dg = g_subdiff(p.g(), x);
  const Vector grad = p.f().gradient(x);
  const SupportSplit split = support_set(y, opt.tol_support);
  CoefficientLP lp(dg);
  for (Index i : split.support) {
    const Vector e = Vector::Unit(n, i);
    const double s = opt.slack ? (*opt.slack)(i) : 0.0;
    if (pin) {
      lp.element_equals(e, (*pin)(i));
    } else if (s <= 0.0) {
      lp.element_equals(e, -grad(i));
    } else {
      lp.element_at_most(e, -grad(i) + s);
      lp.element_at_most(-e, grad(i) + s);
    }
  }
  // Weighted coefficient objective so the optimum is a vertex; flipping the
  // orientation usually lands on a different one.
  Vector w = Vector::Zero(dg.num_coefficients());
  for (Index j = 0; j < dg.num_points(); ++j) w(j) = orientation * static_cast<double>(j + 1);
  if (orientation < 0)
    for (Index k = 0; k < dg.num_rays(); ++k) w(dg.num_points() + k) = -1.0;
  lp.maximize_coefficients(w);
  const auto res = lp.solve();
  if (!res.outcome.optimal()) return std::nullopt;
  return res.element;
}

} // namespace detail

/// A multiplier certifying lifted stationarity, or nullopt if none exists.
template <SmoothFunction F>
std::optional<Multiplier> stationarity_multiplier(const CompositeProblem<F> &p,
                                                  const Vector &y,
                                                  const MultiplierOptions &opt = {}) {
  require_dim(y.size(), p.dimension(), "multiplier point");
  auto v = detail::multiplier_lp(p, y, opt, +1.0);
  if (!v) return std::nullopt;
  return Multiplier{*v, 2.0 * y.cwiseProduct(*v)};
}

/// Two vertex witnesses (possibly equal) for the same multiplier LP. The second
/// shares the support components of the first.
template <SmoothFunction F>
std::optional<std::pair<Multiplier, Multiplier>>
stationarity_multiplier_pair(const CompositeProblem<F> &p, const Vector &y,
                             const MultiplierOptions &opt = {}) {
  auto a = detail::multiplier_lp(p, y, opt, +1.0);
  if (!a) return std::nullopt;
  auto b = detail::multiplier_lp(p, y, opt, -1.0, &*a);
  if (!b) b = a;
  return std::make_pair(Multiplier{*a, 2.0 * y.cwiseProduct(*a)},
                        Multiplier{*b, 2.0 * y.cwiseProduct(*b)});
}

/// d²(g∘T)(ȳ | 2ȳ∘v)(w) for w ∈ S_I; the support components of w are zeroed.
inline ExtendedReal d2_lifted_g(const PolyhedralFunction &g, const Vector &ybar,
                                const Vector &v, const Vector &w,
                                double tol_support = tol::support) {
  const Index n = g.dimension();
  require_dim(ybar.size(), n, "d2 base point");
  require_dim(v.size(), n, "d2 multiplier");
  require_dim(w.size(), n, "d2 direction");
  const Vector x = ybar.cwiseProduct(ybar);
  if (!g.domain().contains(x))
    throw Error(ErrorKind::OutOfLiftedDomain, "ȳ² is outside dom g");
  const SupportSplit split = support_set(ybar, tol_support);
  Vector w2 = w.cwiseProduct(w);
  for (Index i : split.support) w2(i) = 0.0;

  const GeneratorSet dg = g_subdiff(g, x);
  CoefficientLP lp(dg);
  for (Index i : split.support) lp.element_equals(Vector::Unit(n, i), v(i));
  lp.maximize_element(w2);
  const auto res = lp.solve();
  switch (res.outcome.status) {
  case LPStatus::Infeasible:
    throw Error(ErrorKind::InfeasibleMultiplier,
                "no p ∈ ∂g(ȳ²) with p_I = v_I (v is not a valid multiplier)");
  case LPStatus::Unbounded:
    return ExtendedReal::pos_inf();
  case LPStatus::Optimal:
    break;
  }
  return ExtendedReal(2.0 * res.outcome.value.value());
}

namespace detail {
template <SmoothFunction F>
ExtendedReal d2_objective_with(const CompositeProblem<F> &p, const Vector &y,
                               const Vector &v, const Vector &w, double tol_support) {
  const Vector x = y.cwiseProduct(y);
  Vector wS = w;
  for (Index i : support_set(y, tol_support).support) wS(i) = 0.0;
  const ExtendedReal dg = d2_lifted_g(p.g(), y, v, wS, tol_support);
  return dg + 2.0 * p.f().gradient(x).dot(wS.cwiseProduct(wS));
}
} // namespace detail

/// d²Φ(y|0)(w) = d²(g∘T)(y | -2y∘∇f(x))(w) + 2⟨∇f(x), w²⟩ for w ∈ S_I.
/// Evaluated with two multiplier witnesses; disagreement is an error.
template <SmoothFunction F>
ExtendedReal d2_lifted_objective_on_SI(const CompositeProblem<F> &p, const Vector &y,
                                       const Vector &w,
                                       const MultiplierOptions &opt = {}) {
  require_dim(w.size(), p.dimension(), "d2 direction");
  const auto witnesses = stationarity_multiplier_pair(p, y, opt);
  if (!witnesses) throw Error(ErrorKind::NotStationary, "y is not a stationary point of Φ");
  const ExtendedReal a =
      detail::d2_objective_with(p, y, witnesses->first.v, w, opt.tol_support);
  const ExtendedReal b =
      detail::d2_objective_with(p, y, witnesses->second.v, w, opt.tol_support);
  const bool same = (a.is_finite() && b.is_finite())
                        ? std::abs(a.value() - b.value()) <= 1e-8 * (1.0 + std::abs(a.value()))
                        : a == b;
  if (!same)
    throw Error(ErrorKind::InconsistencyDetected,
                "second subderivative depends on the multiplier witness");
  return a;
}

/// ⟨w, ∇²Φ(y) w⟩ = 2⟨∇f(x), w²⟩ + 4⟨y∘w, ∇²f(x)(y∘w)⟩ for any w. Only valid when
/// g is the indicator of the nonnegative orthant, where Φ = f∘T is C².
template <SmoothFunction F>
double d2_lifted_objective_smooth(const CompositeProblem<F> &p, const Vector &y,
                                  const Vector &w) {
  if (!is_orthant_indicator(p.g()))
    throw Error(ErrorKind::UnsupportedProblemClass,
                "full-space second subderivative needs g = indicator of R^n_+");
  const Vector x = y.cwiseProduct(y);
  const Vector yw = y.cwiseProduct(w);
  return 2.0 * p.f().gradient(x).dot(w.cwiseProduct(w)) +
         4.0 * yw.dot(p.f().hessian(x) * yw);
}

struct CorrespondenceReport {
  bool stationary_for_Phi = false;
  bool second_order_nonneg_on_SI = false;
  bool stationary_for_phi = false;
  bool consistent = false;
  std::optional<Vector> witness_lambda;
  /// A sampled w ∈ S_I with d²Φ(y|0)(w) < 0, when one was found.
  std::optional<Vector> negative_direction;
  /// Sampled directions contradicting the LP verdict.
  int sampling_conflicts = 0;
  double lifted_residual = 0.0;
  double phi_residual = 0.0;
  SupportSplit split;
};

struct CorrespondenceOptions {
  double tol = tol::stationarity;
  double tol_support = tol::support;
  int sampled_directions = 16;
  std::uint64_t seed = 0;
  bool throw_on_inconsistency = true;
};

/// Decides (stationary for Φ and d²Φ(y|0) ≥ 0 on S_I) and (y² stationary for φ)
/// independently, and checks that they agree.
template <SmoothFunction F>
CorrespondenceReport correspondence_check(const CompositeProblem<F> &p, const Vector &y,
                                          const CorrespondenceOptions &opt = {}) {
  const Index n = p.dimension();
  require_dim(y.size(), n, "correspondence point");
  const Vector x = y.cwiseProduct(y);
  if (!p.g().domain().contains(x))
    throw Error(ErrorKind::OutOfLiftedDomain, "y² is outside dom g");

  CorrespondenceReport rep;
  rep.split = support_set(y, opt.tol_support);
  rep.lifted_residual = lifted_residual(p, y);
  rep.phi_residual = phi_residual(p, x);
  rep.stationary_for_Phi = rep.lifted_residual <= opt.tol;
  rep.stationary_for_phi = rep.phi_residual <= opt.tol;

  // Per-coordinate slack matching the residual tolerance on the support.
  MultiplierOptions mopt;
  mopt.tol_support = opt.tol_support;
  Vector slack = Vector::Constant(n, tol::feasibility);
  for (Index i : rep.split.support)
    slack(i) = std::max(tol::feasibility, opt.tol / (2.0 * std::abs(y(i))));
  mopt.slack = slack;

  if (rep.stationary_for_Phi) {
    // {λ ∈ ∂φ(x) : λ_I = 0, λ_{I^c} ≥ 0}, relaxed by the stationarity tolerance.
    const GeneratorSet dphi = phi_subdiff(p, x);
    CoefficientLP lp(dphi);
    for (Index i : rep.split.support) {
      lp.element_at_most(Vector::Unit(n, i), opt.tol);
      lp.element_at_most(-Vector::Unit(n, i), opt.tol);
    }
    for (Index i : rep.split.complement) lp.element_at_most(-Vector::Unit(n, i), opt.tol);
    rep.second_order_nonneg_on_SI = lp.solve().outcome.optimal();

    if (auto m = stationarity_multiplier(p, y, mopt)) rep.witness_lambda = m->lambda;

    // Sampled cross-check: coordinate directions on I^c, then random ones.
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    std::vector<Vector> dirs;
    for (Index i : rep.split.complement) dirs.push_back(Vector::Unit(n, i));
    for (int k = 0; k < opt.sampled_directions && !rep.split.complement.empty(); ++k) {
      Vector w = Vector::Zero(n);
      for (Index i : rep.split.complement) w(i) = normal(rng);
      dirs.push_back(w);
    }
    double most_negative = 0.0;
    for (const auto &w : dirs) {
      const ExtendedReal d2 = d2_lifted_objective_on_SI(p, y, w, mopt);
      if (!d2.is_finite()) continue;
      const double scale = 1.0 + w.squaredNorm();
      if (d2.value() < -opt.tol * scale) {
        if (rep.second_order_nonneg_on_SI) ++rep.sampling_conflicts;
        if (d2.value() / scale < most_negative) {
          most_negative = d2.value() / scale;
          rep.negative_direction = w;
        }
      }
    }
  }

  const bool lhs = rep.stationary_for_Phi && rep.second_order_nonneg_on_SI;
  rep.consistent = (lhs == rep.stationary_for_phi) && rep.sampling_conflicts == 0;
  if (!rep.consistent && opt.throw_on_inconsistency)
    throw Error(ErrorKind::InconsistencyDetected,
                "lifted second-order certificate disagrees with φ-stationarity");
  return rep;
}

} // namespace sqlift
