#pragma once

/// @file
/// Oracle-agreement suite: every fast path is compared against its brute-force
/// reference on seeded random instances.

#include "sqlift/generators.hpp"
#include "sqlift/oracles.hpp"
#include "sqlift/second_order.hpp"

#include <chrono>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace sqlift {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace selftest {

/// lp_solve optimum vs the best enumerated vertex on random bounded LPs.
inline SelfTestResult lp_vs_vertices(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Index n = gen::uniform_int(rng, 1, 4);
    const Polyhedron P = gen::random_bounded_polyhedron(rng, n, gen::uniform_int(rng, 0, 4),
                                                        n > 1 && t % 5 == 0);
    const Vector c = gen::normal_vector(rng, n);
    const auto verts = oracles::enumerate_vertices(P);
    LPProblem lp = LPProblem::free_variables(n);
    lp.objective = c;
    lp.A_ineq = P.A_ineq();
    lp.b_ineq = P.b_ineq();
    lp.A_eq = P.A_eq();
    lp.b_eq = P.b_eq();
    const LPOutcome out = lp_solve(lp);
    if (verts.empty()) {
      bad += out.status != LPStatus::Infeasible;
      continue;
    }
    if (!out.optimal()) {
      ++bad;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &v : verts) best = std::max(best, c.dot(v));
    const double err = std::abs(best - out.value.value());
    worst = std::max(worst, err);
    bad += err > 1e-9;
  }
  std::ostringstream d;
  d << trials << " LPs, " << bad << " disagreements, worst gap " << worst;
  return {"lp_vs_vertex_enumeration", bad == 0, d.str()};
}

/// Projection is idempotent and the projected point is feasible.
inline SelfTestResult projection(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Index n = gen::uniform_int(rng, 1, 5);
    const Polyhedron P = gen::random_bounded_polyhedron(rng, n, gen::uniform_int(rng, 0, 4),
                                                        n > 1 && t % 4 == 0);
    const Vector z = 2.0 * gen::normal_vector(rng, n);
    const Vector p1 = project_onto_polyhedron(P, z);
    const Vector p2 = project_onto_polyhedron(P, p1);
    const double err = (p1 - p2).norm();
    worst = std::max(worst, err);
    bad += err > 1e-9 || !P.contains(p1, 1e-9);
  }
  std::ostringstream d;
  d << trials << " projections, " << bad << " failures, worst drift " << worst;
  return {"projection_idempotence", bad == 0, d.str()};
}

/// Weighted min-norm QP vs grid search on the subdifferentials of random
/// nonsmooth instances, weights |y| and shift ∇f(y²).
inline SelfTestResult min_norm_vs_grid(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  oracles::OracleConfig cfg;
  cfg.resolution = 16;
  int bad = 0, checked = 0;
  for (int t = 0; t < trials; ++t) {
    const gen::Instance in = gen::random_nonsmooth_instance(rng);
    const Vector x = in.y.cwiseProduct(in.y);
    const GeneratorSet dg = g_subdiff(in.problem.g(), x);
    const Vector shift = in.problem.f().gradient(x);
    const Vector w = in.y.cwiseAbs();
    const double qp = min_norm_weighted(dg, shift, w).value;
    const auto grid = oracles::grid_min_norm(dg, shift, w, cfg);
    ++checked;
    bad += qp > grid.value + 1e-9 || qp < grid.value - grid.tolerance - 1e-9;
  }
  std::ostringstream d;
  d << checked << " instances, " << bad << " outside the grid tolerance";
  return {"min_norm_vs_grid", bad == 0, d.str()};
}

/// With g = ι of R^n_+, the lifted residual is the gradient norm of f(y²).
inline SelfTestResult smooth_residual(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const gen::Instance in = gen::random_orthant_instance(rng, gen::uniform_int(rng, 1, 6));
    const Vector x = in.y.cwiseProduct(in.y);
    const double analytic = (2.0 * in.y.cwiseProduct(in.problem.f().gradient(x))).norm();
    const double err = std::abs(lifted_residual(in.problem, in.y) - analytic);
    worst = std::max(worst, err);
    bad += err > 1e-8;
  }
  std::ostringstream d;
  d << trials << " instances, worst error " << worst;
  return {"smooth_lift_residual", bad == 0, d.str()};
}

/// The three designed second-subderivative cases against the definitional quotient.
inline SelfTestResult second_subderivative_cases() {
  std::ostringstream d;
  bool ok = true;
  oracles::OracleConfig cfg;
  auto check = [&](const char *name, const PolyhedralFunction &g, const Vector &ybar,
                   const Vector &v, const Vector &w, double expect) {
    const ExtendedReal val = d2_lifted_g(g, ybar, v, w);
    const auto fd = oracles::fd_second_subderivative(oracles::lifted_g_oracle(g), ybar,
                                                     2.0 * ybar.cwiseProduct(v), w, cfg);
    bool pass;
    if (std::isinf(expect)) {
      pass = val.is_pos_inf() && fd.value.is_pos_inf();
    } else {
      pass = val.is_finite() && std::abs(val.value() - expect) <= 1e-9 && fd.value.is_finite() &&
             std::abs(fd.value.value() - val.value()) <= 0.05 * (1.0 + std::abs(val.value()));
    }
    d << name << ": " << val << " (quotient " << fd.value << ") ";
    ok &= pass;
  };
  Vector y2(2), v2(2), w2(2);
  y2 << 1, 0;
  w2 << 0, 1;
  v2 << 0, -3;
  check("orthant", PolyhedralFunction::nonnegative_indicator(2), y2, v2, w2, 0.0);
  v2 << 1, 0;
  check("simplex", PolyhedralFunction::simplex_indicator(2), y2, v2, w2, 2.0);
  Polyhedron origin(1);
  origin.add_equality(Vector::Ones(1), 0.0);
  check("point", PolyhedralFunction::indicator(origin), Vector::Zero(1), Vector::Zero(1),
        Vector::Ones(1), std::numeric_limits<double>::infinity());
  return {"second_subderivative_designed_cases", ok, d.str()};
}

/// Every generator of ∂g(x) (points, and points plus rays) satisfies the
/// subgradient inequality on random instances.
inline SelfTestResult subgradient_generators(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  oracles::OracleConfig cfg;
  cfg.inequality_samples = 60;
  int bad = 0, checked = 0;
  for (int t = 0; t < trials; ++t) {
    const gen::Instance in = gen::random_nonsmooth_instance(rng);
    const Vector x = in.y.cwiseProduct(in.y);
    const GeneratorSet dg = g_subdiff(in.problem.g(), x);
    cfg.seed = seed + static_cast<std::uint64_t>(t);
    const auto samples = oracles::feasible_samples(in.problem.g().domain(), x, cfg);
    auto geval = [&](const Vector &z) { return g_eval(in.problem.g(), z); };
    for (const auto &p : dg.points()) {
      std::vector<Vector> cands{p};
      for (const auto &r : dg.rays()) cands.push_back(p + r);
      for (const auto &l : dg.lines()) {
        cands.push_back(p + l);
        cands.push_back(p - l);
      }
      for (const auto &v : cands) {
        ++checked;
        bad += !oracles::subgradient_inequality_check(geval, x, v, samples);
      }
    }
  }
  std::ostringstream d;
  d << checked << " subgradients, " << bad << " violations";
  return {"subgradient_inequality", bad == 0, d.str()};
}

/// The correspondence certificate on random lifted-stationary and random instances.
inline SelfTestResult correspondence(std::uint64_t seed, int trials) {
  gen::Rng rng(seed);
  CorrespondenceOptions opt;
  opt.throw_on_inconsistency = false;
  int inconsistent = 0, spurious = 0, genuine = 0;
  for (int t = 0; t < trials; ++t) {
    const gen::Instance in = t % 2 == 0 ? gen::random_lifted_stationary_instance(rng)
                                        : gen::random_nonsmooth_instance(rng);
    opt.seed = seed + static_cast<std::uint64_t>(t);
    const auto rep = correspondence_check(in.problem, in.y, opt);
    inconsistent += !rep.consistent;
    if (rep.stationary_for_Phi) (rep.stationary_for_phi ? genuine : spurious) += 1;
  }
  std::ostringstream d;
  d << trials << " instances, " << inconsistent << " inconsistent, " << genuine
    << " genuine and " << spurious << " spurious lifted-stationary points";
  return {"stationarity_correspondence", inconsistent == 0, d.str()};
}

template <typename Fn>
SelfTestResult timed(const char *name, Fn &&fn) {
  const auto t0 = std::chrono::steady_clock::now();
  SelfTestResult r;
  try {
    r = fn();
  } catch (const std::exception &e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.name = name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

} // namespace selftest

inline std::vector<SelfTestResult> run_selftest(std::uint64_t seed = 0) {
  using namespace selftest;
  return {
      timed("lp_vs_vertex_enumeration", [&] { return lp_vs_vertices(seed, 200); }),
      timed("projection_idempotence", [&] { return projection(seed + 1, 100); }),
      timed("min_norm_vs_grid", [&] { return min_norm_vs_grid(seed + 2, 60); }),
      timed("smooth_lift_residual", [&] { return smooth_residual(seed + 3, 100); }),
      timed("second_subderivative_designed_cases", [] { return second_subderivative_cases(); }),
      timed("subgradient_inequality", [&] { return subgradient_generators(seed + 4, 40); }),
      timed("stationarity_correspondence", [&] { return correspondence(seed + 5, 100); }),
  };
}

} // namespace sqlift
