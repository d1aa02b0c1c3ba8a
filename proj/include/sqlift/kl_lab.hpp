#pragma once

/// @file
/// KL exponents: prediction from supplied hypotheses, strict complementarity,
/// and an empirical estimate from the lower envelope of (gap, residual) samples.

#include "sqlift/reparam.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

namespace sqlift {

/// 0 ∈ ri ∂φ(x̄) at a stationary point x̄.
template <SmoothFunction F>
bool strict_complementarity(const CompositeProblem<F> &p, const Vector &xbar,
                            double tau = tol::stationarity) {
  require_dim(xbar.size(), p.dimension(), "strict complementarity point");
  if (!p.g().domain().contains(xbar))
    throw Error(ErrorKind::OutOfDomain, "x̄ is outside dom g");
  if (phi_residual(p, xbar) > tau)
    throw Error(ErrorKind::NotAStationaryPoint, "x̄ is not stationary for φ");
  return vrep_ri_membership(phi_subdiff(p, xbar), Vector::Zero(p.dimension()));
}

struct ExponentInputs {
  double alpha = 0.5;
  std::optional<double> gamma;
  bool strict = true;
};

/// Strict complementarity: max{α, 1/2}. Otherwise (1+β)/2 with β = 1 − γ(1−α).
inline double predict_exponent(const ExponentInputs &in) {
  if (!(in.alpha > 0.0 && in.alpha < 1.0))
    throw Error(ErrorKind::InvalidRange, "alpha must lie in (0,1)");
  if (in.strict) return std::max(in.alpha, 0.5);
  if (!in.gamma) throw Error(ErrorKind::InvalidRange, "gamma is required without strict complementarity");
  const double g = *in.gamma;
  if (!(g > 0.0 && g <= 1.0)) throw Error(ErrorKind::InvalidRange, "gamma must lie in (0,1]");
  const double beta = 1.0 - g * (1.0 - in.alpha);
  return 0.5 * (1.0 + beta);
}

struct ScatterConfig {
  double delta_min = 1e-6;
  double delta_max = 1e-2;
  int n_dirs = 32;
  int n_radii = 64;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(delta_min > 0.0 && delta_min < delta_max) || !std::isfinite(delta_max))
      throw Error(ErrorKind::InvalidRange, "need 0 < delta_min < delta_max < ∞");
    if (n_dirs < 1 || n_radii < 1) throw Error(ErrorKind::InvalidRange, "need n_dirs, n_radii ≥ 1");
  }
};

struct ScatterSample {
  double gap = 0.0;
  double residual = 0.0;
  Vector y;
};

/// Samples y = s∘√x around a lifted-stationary ȳ with x the projection of
/// ȳ² + δu onto dom g. Signs follow ȳ on its support and are random elsewhere.
/// Samples whose gap is below 10·eps·max(1, |Φ(ȳ)|) are discarded. The result
/// is sorted by (gap, residual).
template <SmoothFunction F>
std::vector<ScatterSample> sample_scatter(const CompositeProblem<F> &p, const Vector &ybar,
                                          const ScatterConfig &cfg = {},
                                          double tau = tol::stationarity) {
  cfg.validate();
  const Index n = p.dimension();
  require_dim(ybar.size(), n, "scatter base point");
  const Vector xbar = ybar.cwiseProduct(ybar);
  if (!p.g().domain().contains(xbar))
    throw Error(ErrorKind::OutOfLiftedDomain, "ȳ² is outside dom g");
  if (lifted_residual(p, ybar) > tau)
    throw Error(ErrorKind::NotAStationaryPoint, "ȳ is not stationary for Φ");
  const double base = lift_eval(p, ybar).value();
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(base));
  const SupportSplit split = support_set(ybar);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin;
  std::vector<ScatterSample> out;
  const double lmin = std::log(cfg.delta_min), lmax = std::log(cfg.delta_max);
  for (int r = 0; r < cfg.n_radii; ++r) {
    const double frac = cfg.n_radii == 1 ? 0.0 : static_cast<double>(r) / (cfg.n_radii - 1);
    const double delta = std::exp(lmin + frac * (lmax - lmin));
    for (int d = 0; d < cfg.n_dirs; ++d) {
      Vector u(n);
      for (Index i = 0; i < n; ++i) u(i) = normal(rng);
      if (u.norm() == 0.0) continue;
      u.normalize();
      Vector sign = Vector::Ones(n);
      for (Index i : split.support) sign(i) = ybar(i) < 0 ? -1.0 : 1.0;
      for (Index i : split.complement) sign(i) = coin(rng) ? 1.0 : -1.0;
      const Vector x = project_onto_polyhedron(p.g().domain(), xbar + delta * u).cwiseMax(0.0);
      if (!p.g().domain().contains(x)) continue;
      const Vector y = sign.cwiseProduct(x.cwiseSqrt());
      const ExtendedReal val = lift_eval(p, y);
      if (!val.is_finite()) continue;
      const double gap = val.value() - base;
      if (!(gap > floor)) continue;
      out.push_back({gap, lifted_residual(p, y), y});
    }
  }
  if (out.empty()) throw Error(ErrorKind::InsufficientSamples, "every sampled gap is below the floor");
  std::sort(out.begin(), out.end(), [](const ScatterSample &a, const ScatterSample &b) {
    return std::tie(a.gap, a.residual) < std::tie(b.gap, b.residual);
  });
  return out;
}

struct KLFitConfig {
  ScatterConfig scatter;
  int n_bins = 12;
  int min_bins = 8;
  double verdict_tol = 0.05;
  std::optional<ExponentInputs> inputs;
};

struct KLFitReport {
  double alpha_hat = 0.0;
  std::size_t n_samples = 0;
  std::pair<double, double> gap_range{0.0, 0.0};
  std::vector<std::pair<double, double>> bin_minima; // (log gap, log residual)
  double r_squared = 0.0;
  std::optional<double> predicted;
  std::optional<bool> verdict;
};

namespace detail {
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<std::pair<double, double>> &pts) {
  const double m = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}
} // namespace detail

/// Fits log(min residual) against log(gap) over log-spaced gap bins.
inline KLFitReport fit_lower_envelope(const std::vector<ScatterSample> &samples,
                                      const KLFitConfig &cfg = {}) {
  if (samples.empty()) throw Error(ErrorKind::InsufficientSamples, "no samples to fit");
  KLFitReport rep;
  rep.n_samples = samples.size();
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (const auto &s : samples) {
    gmin = std::min(gmin, s.gap);
    gmax = std::max(gmax, s.gap);
  }
  rep.gap_range = {gmin, gmax};
  const int nb = cfg.n_bins;
  const double lo = std::log(gmin), hi = std::log(gmax);
  std::vector<std::optional<std::size_t>> best(static_cast<std::size_t>(nb));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto &s = samples[k];
    if (!(s.residual > 0.0)) continue;
    int b = hi > lo ? static_cast<int>((std::log(s.gap) - lo) / (hi - lo) * nb) : 0;
    b = std::clamp(b, 0, nb - 1);
    auto &slot = best[static_cast<std::size_t>(b)];
    if (!slot || s.residual < samples[*slot].residual) slot = k;
  }
  for (const auto &slot : best)
    if (slot)
      rep.bin_minima.emplace_back(std::log(samples[*slot].gap), std::log(samples[*slot].residual));
  if (static_cast<int>(rep.bin_minima.size()) < cfg.min_bins)
    throw Error(ErrorKind::InsufficientSamples, "fewer nonempty gap bins than required");
  const detail::LineFit fit = detail::fit_line(rep.bin_minima);
  rep.alpha_hat = fit.slope;
  rep.r_squared = fit.r_squared;
  if (cfg.inputs) {
    rep.predicted = predict_exponent(*cfg.inputs);
    rep.verdict = std::abs(rep.alpha_hat - *rep.predicted) <= cfg.verdict_tol;
  }
  return rep;
}

template <SmoothFunction F>
KLFitReport estimate_exponent(const CompositeProblem<F> &p, const Vector &ybar,
                              const KLFitConfig &cfg = {}) {
  return fit_lower_envelope(sample_scatter(p, ybar, cfg.scatter), cfg);
}

struct ErrorBoundProbeConfig {
  ScatterConfig scatter;
  double tol_support = tol::support;
};

/// Empirical infimum of
///   [Σ_{i∈I} v_i² + Σ_{i∉I} |x_i − x̄_i| v_i²] / (φ(x) − φ(x̄))^{1+β}
/// over sampled x near the minimizer x̄, with v ranging over ∂φ(x) (the
/// numerator is minimized exactly). I = {i : x̄_i > tol_support}.
template <SmoothFunction F>
double error_bound_probe(const CompositeProblem<F> &p, const Vector &xbar, double beta,
                     const ErrorBoundProbeConfig &cfg = {}) {
  const Index n = p.dimension();
  require_dim(xbar.size(), n, "probe base point");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidRange, "beta must lie in [0,1)");
  cfg.scatter.validate();
  const Matrix H = p.f().hessian(xbar);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (H + H.transpose()));
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw Error(ErrorKind::NotConvex, "f is not convex (indefinite Hessian)");
  if (!p.g().domain().contains(xbar)) throw Error(ErrorKind::OutOfDomain, "x̄ is outside dom g");
  if (phi_residual(p, xbar) > tol::stationarity)
    throw Error(ErrorKind::NotAMinimizer, "x̄ is not a minimizer of φ");
  const double base = phi_eval(p, xbar).value();
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(base));

  std::mt19937_64 rng(cfg.scatter.seed);
  std::normal_distribution<double> normal;
  const double lmin = std::log(cfg.scatter.delta_min), lmax = std::log(cfg.scatter.delta_max);
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int r = 0; r < cfg.scatter.n_radii; ++r) {
    const double frac =
        cfg.scatter.n_radii == 1 ? 0.0 : static_cast<double>(r) / (cfg.scatter.n_radii - 1);
    const double delta = std::exp(lmin + frac * (lmax - lmin));
    for (int d = 0; d < cfg.scatter.n_dirs; ++d) {
      Vector u(n);
      for (Index i = 0; i < n; ++i) u(i) = normal(rng);
      if (u.norm() == 0.0) continue;
      u.normalize();
      const Vector x = project_onto_polyhedron(p.g().domain(), xbar + delta * u);
      const ExtendedReal val = phi_eval(p, x);
      if (!val.is_finite()) continue;
      const double gap = val.value() - base;
      if (gap < -tol::stationarity)
        throw Error(ErrorKind::NotAMinimizer, "a sampled point improves on x̄");
      if (!(gap > floor)) continue;
      Vector weights(n);
      for (Index i = 0; i < n; ++i)
        weights(i) = xbar(i) > cfg.tol_support ? 1.0 : std::sqrt(std::abs(x(i) - xbar(i)));
      const double lhs =
          std::pow(min_norm_weighted(phi_subdiff(p, x), Vector::Zero(n), weights).value, 2);
      best = std::min(best, lhs / std::pow(gap, 1.0 + beta));
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::InsufficientSamples, "no sample with a positive gap");
  return best;
}

} // namespace sqlift
