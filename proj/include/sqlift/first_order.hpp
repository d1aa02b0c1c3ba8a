#pragma once

/// @file
/// First-order descent on φ and on its squared lift, and a rate classifier
/// for the resulting objective-gap traces.

#include "sqlift/kl_lab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace sqlift {

enum class Variant { Original, Lifted };

inline std::string_view to_string(Variant v) {
  return v == Variant::Original ? "original" : "lifted";
}

struct Iterate {
  int k = 0;
  double value = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

enum class RateKind { Linear, Sublinear };

struct RateFit {
  RateKind kind = RateKind::Linear;
  /// ρ for gap ~ ρ^k, p for gap ~ k^{-p}.
  double parameter = 0.0;
  double r_squared_linear = 0.0;
  double r_squared_power = 0.0;
  int points_used = 0;
};

struct SolverTrace {
  Variant variant = Variant::Original;
  std::vector<Iterate> iterates;
  Vector final_point;
  double reference_value = 0.0;
  std::optional<RateFit> rate;
};

struct StepRule {
  /// Armijo backtracking for the lifted variant.
  double initial_step = 0.1;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  /// Relative increase of the objective that counts as divergence.
  double divergence_tol = 1e-12;
};

struct FirstOrderOptions {
  int steps = 1000;
  StepRule rule;
  /// Best-known optimal value; the trace minimum is used when absent.
  std::optional<double> reference_value;
  std::uint64_t seed = 0;
};

namespace detail {

/// Largest |eigenvalue| of a symmetric matrix by power iteration.
inline double spectral_bound(const Matrix &Q, std::uint64_t seed, int iterations = 500) {
  const Index n = Q.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  if (v.norm() == 0.0) v.setOnes();
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = Q * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    est = nw;
    v = w / nw;
  }
  return est;
}

inline void check_descent(double prev, double next, const StepRule &rule) {
  if (!std::isfinite(next) || next > prev + rule.divergence_tol * (1.0 + std::abs(prev)))
    throw Error(ErrorKind::DivergenceDetected, "objective increased along a descent method");
}

} // namespace detail

/// variant = Original: projected gradient x⁺ = Π(x − ∇f(x)/L) on dom g (g an
/// indicator). variant = Lifted: Armijo gradient descent on f(y²) for the
/// orthant, and sphere-projected gradient for the simplex.
template <SmoothFunction F>
SolverTrace run_first_order(const CompositeProblem<F> &p, Variant variant, const Vector &start,
                            const FirstOrderOptions &opt = {}) {
  const Index n = p.dimension();
  require_dim(start.size(), n, "solver start");
  if (opt.steps < 1) throw Error(ErrorKind::InvalidRange, "steps must be ≥ 1");
  if (!p.g().is_indicator())
    throw Error(ErrorKind::UnsupportedProblemClass, "first-order solvers need an indicator g");
  const auto &f = p.f();
  const StepRule &rule = opt.rule;
  SolverTrace tr;
  tr.variant = variant;
  std::vector<Iterate> its;

  if (variant == Variant::Original) {
    const Polyhedron &dom = p.g().domain();
    double L = detail::spectral_bound(f.hessian(start), opt.seed);
    if (!(L > 0.0)) L = 1.0;
    const double t = 1.0 / L;
    Vector x = project_onto_polyhedron(dom, start);
    double val = f.value(x);
    for (int k = 0; k <= opt.steps; ++k) {
      its.push_back({k, val, 0.0, phi_residual(p, x), k == 0 ? 0.0 : t});
      if (k == opt.steps) break;
      const Vector next = project_onto_polyhedron(dom, x - t * f.gradient(x));
      const double nv = f.value(next);
      detail::check_descent(val, nv, rule);
      x = next;
      val = nv;
    }
    tr.final_point = x;
  } else {
    const bool orthant = is_orthant_indicator(p.g());
    const bool sphere = !orthant && is_simplex_indicator(p.g());
    if (!orthant && !sphere)
      throw Error(ErrorKind::UnsupportedProblemClass,
                  "lifted descent supports the orthant and simplex indicators only");
    auto value = [&](const Vector &y) { return f.value(y.cwiseProduct(y)); };
    auto direction = [&](const Vector &y) {
      Vector gr = 2.0 * y.cwiseProduct(f.gradient(y.cwiseProduct(y)));
      if (sphere) gr -= gr.dot(y) * y;
      return gr;
    };
    auto retract = [&](Vector y) {
      if (sphere) {
        const double nn = y.norm();
        if (nn == 0.0) throw Error(ErrorKind::NumericalFailure, "iterate collapsed to the origin");
        y /= nn;
      }
      return y;
    };
    Vector y = retract(start);
    double val = value(y);
    double last_step = 0.0;
    for (int k = 0; k <= opt.steps; ++k) {
      const Vector gr = direction(y);
      its.push_back({k, val, 0.0, gr.norm(), last_step});
      if (k == opt.steps) break;
      const double gg = gr.squaredNorm();
      if (gg == 0.0) {
        last_step = 0.0;
        continue;
      }
      double t = rule.initial_step;
      Vector next = retract(y - t * gr);
      double nv = value(next);
      int bt = 0;
      while (!(nv <= val - rule.sufficient_decrease * t * gg) && bt < rule.max_backtracks) {
        t *= rule.shrink;
        next = retract(y - t * gr);
        nv = value(next);
        ++bt;
      }
      if (bt == rule.max_backtracks) {
        // No acceptable step at machine precision: stay put.
        if (nv > val) {
          last_step = 0.0;
          continue;
        }
      }
      detail::check_descent(val, nv, rule);
      y = next;
      val = nv;
      last_step = t;
    }
    tr.final_point = y;
  }

  double ref = std::numeric_limits<double>::infinity();
  for (const auto &it : its) ref = std::min(ref, it.value);
  if (opt.reference_value) ref = *opt.reference_value;
  tr.reference_value = ref;
  for (auto &it : its) it.gap = it.value - ref;
  tr.iterates = std::move(its);
  return tr;
}

/// Fits gap_k = C ρ^k and gap_k = C k^{-p} on the last half of the leading run
/// of strictly decreasing positive gaps and keeps the model with higher R².
inline RateFit fit_rate(const std::vector<Iterate> &iterates) {
  std::size_t begin = 0;
  while (begin < iterates.size() && !(iterates[begin].gap > 0.0)) ++begin;
  std::size_t end = begin;
  while (end + 1 < iterates.size() && iterates[end + 1].gap > 0.0 &&
         iterates[end + 1].gap < iterates[end].gap)
    ++end;
  const std::size_t run = begin < iterates.size() ? end - begin + 1 : 0;
  if (run < 20) throw Error(ErrorKind::InsufficientTrace, "fewer than 20 decreasing positive gaps");
  const std::size_t tail = begin + run / 2;
  std::vector<std::pair<double, double>> lin, pow;
  for (std::size_t i = tail; i <= end; ++i) {
    const double lg = std::log(iterates[i].gap);
    lin.emplace_back(static_cast<double>(iterates[i].k), lg);
    if (iterates[i].k > 0) pow.emplace_back(std::log(static_cast<double>(iterates[i].k)), lg);
  }
  const detail::LineFit fl = detail::fit_line(lin);
  const detail::LineFit fp = detail::fit_line(pow);
  RateFit out;
  out.r_squared_linear = fl.r_squared;
  out.r_squared_power = fp.r_squared;
  out.points_used = static_cast<int>(lin.size());
  if (fl.r_squared >= fp.r_squared) {
    out.kind = RateKind::Linear;
    out.parameter = std::exp(fl.slope);
  } else {
    out.kind = RateKind::Sublinear;
    out.parameter = -fp.slope;
  }
  return out;
}

inline RateFit fit_rate(const SolverTrace &trace) { return fit_rate(trace.iterates); }

} // namespace sqlift
