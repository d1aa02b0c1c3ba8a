#include "sqlift/sqlift.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

using namespace sqlift;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

QuadraticProblem quartic() {
  Matrix Q(1, 1);
  Q << 1;
  return {SmoothQuadratic(Q, vec({0}), 0.0), PolyhedralFunction::nonnegative_indicator(1)};
}
QuadraticProblem nnls1() {
  return {SmoothQuadratic::distance_to(vec({1})), PolyhedralFunction::nonnegative_indicator(1)};
}
QuadraticProblem orthant2() {
  return {SmoothQuadratic::distance_to(vec({1, -1})), PolyhedralFunction::nonnegative_indicator(2)};
}
QuadraticProblem simplex_linear() {
  return {SmoothQuadratic::linear(vec({1, 2})), PolyhedralFunction::simplex_indicator(2)};
}
PolyhedralFunction origin_indicator() {
  Polyhedron p(1);
  p.add_equality(vec({1}), 0.0);
  return PolyhedralFunction::indicator(p);
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void check(bool ok, const std::string &what) {
    if (!ok) {
      passed = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool run_criterion(int id, const char *title, double budget,
                   const std::function<void(Outcome &)> &body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception &e) {
    o.passed = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = since(t0);
  if (secs > budget) {
    o.passed = false;
    o.detail << "[over budget " << budget << " s] ";
  }
  std::printf("%s %d %-28s %7.2fs  %s\n", o.passed ? "PASS" : "FAIL", id, title, secs,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.passed;
}

void residual_identity(Outcome &o) {
  gen::Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const gen::Instance in = gen::random_orthant_instance(rng, gen::uniform_int(rng, 1, 6));
    const Vector x = in.y.cwiseProduct(in.y);
    const double analytic = (2.0 * in.y.cwiseProduct(in.problem.f().gradient(x))).norm();
    worst = std::max(worst, std::abs(lifted_residual(in.problem, in.y) - analytic));
  }
  o.check(worst <= 1e-8, "smooth lift");
  int outside = 0;
  oracles::OracleConfig cfg;
  cfg.resolution = 16;
  for (int t = 0; t < 100; ++t) {
    const gen::Instance in = gen::random_nonsmooth_instance(rng);
    const Vector x = in.y.cwiseProduct(in.y);
    const auto grid = oracles::grid_min_norm(g_subdiff(in.problem.g(), x),
                                             in.problem.f().gradient(x), in.y.cwiseAbs(), cfg);
    const double half = 0.5 * lifted_residual(in.problem, in.y);
    outside += half > grid.value + 1e-9 || half < grid.value - grid.tolerance - 1e-9;
  }
  o.check(outside == 0, "nonsmooth grid");
  o.detail << "smooth worst error " << worst << ", nonsmooth outside tolerance " << outside
           << "/100";
}

void correspondence(Outcome &o) {
  gen::Rng rng(2002);
  CorrespondenceOptions opt;
  int inconsistent = 0;
  auto count = [&](const CorrespondenceReport &r) { inconsistent += !r.consistent; };
  for (int t = 0; t < 200; ++t) {
    const gen::Instance in = t % 2 == 0 ? gen::random_lifted_stationary_instance(rng)
                                        : gen::random_nonsmooth_instance(rng);
    opt.seed = static_cast<std::uint64_t>(t);
    try {
      count(correspondence_check(in.problem, in.y, opt));
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::InconsistencyDetected) throw;
      ++inconsistent;
    }
  }
  count(correspondence_check(orthant2(), vec({1, 0}), opt));
  count(correspondence_check(simplex_linear(), vec({1, 0}), opt));
  const CorrespondenceReport spurious = correspondence_check(orthant2(), vec({0, 0}), opt);
  count(spurious);
  o.check(inconsistent == 0, "inconsistency");
  o.check(spurious.stationary_for_Phi && !spurious.stationary_for_phi, "spurious origin");
  o.detail << inconsistent << " inconsistent of 203";
}

void second_subderivative(Outcome &o) {
  oracles::OracleConfig cfg;
  struct Case {
    const char *name;
    PolyhedralFunction g;
    Vector y, v, w;
    double expect;
  };
  const std::vector<Case> cases{
      {"orthant", PolyhedralFunction::nonnegative_indicator(2), vec({1, 0}), vec({0, -3}),
       vec({0, 1}), 0.0},
      {"simplex", PolyhedralFunction::simplex_indicator(2), vec({1, 0}), vec({1, 0}),
       vec({0, 1}), 2.0},
      {"point", origin_indicator(), vec({0}), vec({0}), vec({1}),
       std::numeric_limits<double>::infinity()},
  };
  for (const Case &c : cases) {
    const ExtendedReal val = d2_lifted_g(c.g, c.y, c.v, c.w);
    const auto fd = oracles::fd_second_subderivative(oracles::lifted_g_oracle(c.g), c.y,
                                                     2.0 * c.y.cwiseProduct(c.v), c.w, cfg);
    if (std::isinf(c.expect)) {
      o.check(val.is_pos_inf() && fd.value.is_pos_inf(), c.name);
    } else {
      o.check(val.is_finite() && val.value() == c.expect, c.name);
      o.check(fd.value.is_finite() &&
                  std::abs(fd.value.value() - val.value()) <= 0.05 * (1.0 + std::abs(val.value())),
              std::string(c.name) + " quotient");
    }
    o.detail << c.name << " " << val << " (quotient " << fd.value << "), ";
  }
  gen::Rng rng(3003);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const gen::Instance in = gen::random_lifted_stationary_instance(rng);
    const auto pair = stationarity_multiplier_pair(in.problem, in.y);
    if (!pair) {
      o.check(false, "multiplier");
      continue;
    }
    Vector w = gen::normal_vector(rng, in.problem.dimension());
    for (Index i : support_set(in.y).support) w(i) = 0.0;
    const ExtendedReal a = d2_lifted_g(in.problem.g(), in.y, pair->first.v, w);
    const ExtendedReal b = d2_lifted_g(in.problem.g(), in.y, pair->second.v, w);
    if (a.is_finite() && b.is_finite())
      worst = std::max(worst, std::abs(a.value() - b.value()) / (1.0 + std::abs(a.value())));
    else
      o.check(a == b, "witness independence (infinite)");
  }
  o.check(worst <= 1e-8, "witness independence");
  o.detail << "witness spread " << worst;
}

void kl_exponent(Outcome &o, bool strict) {
  KLFitConfig cfg;
  if (strict) {
    cfg.inputs = ExponentInputs{0.5, std::nullopt, true};
    const KLFitReport r = estimate_exponent(nnls1(), vec({1}), cfg);
    const bool sc = strict_complementarity(nnls1(), vec({1}));
    o.check(r.alpha_hat >= 0.45 && r.alpha_hat <= 0.55, "alpha_hat range");
    o.check(*r.predicted == 0.5, "prediction");
    o.check(sc, "strict complementarity");
    o.detail << "alpha_hat " << r.alpha_hat << ", predicted " << *r.predicted
             << ", strict_complementarity " << (sc ? "true" : "false");
  } else {
    cfg.inputs = ExponentInputs{0.5, 1.0, false};
    const KLFitReport r = estimate_exponent(quartic(), vec({0}), cfg);
    const bool sc = strict_complementarity(quartic(), vec({0}));
    o.check(r.alpha_hat >= 0.70 && r.alpha_hat <= 0.80, "alpha_hat range");
    o.check(*r.predicted == 0.75, "prediction");
    o.check(!sc, "strict complementarity");
    o.detail << "alpha_hat " << r.alpha_hat << ", predicted " << *r.predicted
             << ", strict_complementarity " << (sc ? "true" : "false");
  }
}

void rates(Outcome &o) {
  FirstOrderOptions opt;
  opt.steps = 10000;
  opt.reference_value = 0.0;
  const RateFit strict = fit_rate(run_first_order(nnls1(), Variant::Lifted, vec({0.5}), opt));
  const RateFit quart = fit_rate(run_first_order(quartic(), Variant::Lifted, vec({1}), opt));
  o.check(strict.kind == RateKind::Linear, "strict linear");
  o.check(quart.kind == RateKind::Sublinear && quart.parameter >= 1.7 && quart.parameter <= 2.3,
          "quartic sublinear");
  o.detail << "strict " << (strict.kind == RateKind::Linear ? "linear rho " : "sublinear p ")
           << strict.parameter << ", quartic "
           << (quart.kind == RateKind::Linear ? "linear rho " : "sublinear p ") << quart.parameter;
}

void kernels(Outcome &o) {
  gen::Rng rng(6006);
  int lp_bad = 0, infeasible = 0;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const Index n = gen::uniform_int(rng, 1, 6);
    Polyhedron P = Polyhedron::nonnegative_orthant(n);
    P.add_inequality(Vector::Ones(n), 3.0);
    const int m = gen::uniform_int(rng, 1, std::min(10, 15 - static_cast<int>(n)));
    for (int r = 0; r < m; ++r) {
      Vector a(n);
      for (Index i = 0; i < n; ++i) a(i) = gen::uniform(rng, -2, 2);
      P.add_inequality(a, gen::uniform(rng, -2, 2));
    }
    LPProblem lp = LPProblem::free_variables(n);
    for (Index i = 0; i < n; ++i) lp.objective(i) = gen::uniform(rng, -2, 2);
    lp.A_ineq = P.A_ineq();
    lp.b_ineq = P.b_ineq();
    const auto verts = oracles::enumerate_vertices(P, false);
    const LPOutcome out = lp_solve(lp);
    if (verts.empty()) {
      ++infeasible;
      lp_bad += out.status != LPStatus::Infeasible;
      continue;
    }
    if (!out.optimal()) {
      ++lp_bad;
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &v : verts) best = std::max(best, lp.objective.dot(v));
    const double err = std::abs(best - out.value.value());
    worst = std::max(worst, err);
    lp_bad += err > 1e-9;
  }
  o.check(lp_bad == 0, "LP agreement");

  double drift = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Index n = gen::uniform_int(rng, 1, 5);
    const Polyhedron P = gen::random_bounded_polyhedron(rng, n, gen::uniform_int(rng, 0, 4),
                                                        n > 1 && t % 4 == 0);
    const Vector p1 = project_onto_polyhedron(P, 2.0 * gen::normal_vector(rng, n));
    drift = std::max(drift, (project_onto_polyhedron(P, p1) - p1).norm());
  }
  o.check(drift <= 1e-9, "projection idempotence");

  auto interval = [](double a, double b) { return GeneratorSet(1, {vec({a}), vec({b})}, {}, {}); };
  const GeneratorSet half(1, {vec({0})}, {vec({-1})}, {});
  const GeneratorSet slab(2, {vec({0, 1})}, {vec({0, -1})}, {});
  const GeneratorSet quadrant(2, {vec({0, 0})}, {vec({-1, 0}), vec({0, -1})}, {});
  const GeneratorSet edge(2, {vec({0, 0})}, {vec({0, -1})}, {});
  const GeneratorSet line(2, {vec({1, 0})}, {}, {vec({1, 1})});
  const GeneratorSet tri(2, {vec({0, 0}), vec({1, 0}), vec({0, 1})}, {}, {});
  struct RiCase {
    const GeneratorSet *set;
    Vector z;
    bool expect;
  };
  const GeneratorSet i11 = interval(-1, 1), i33 = interval(3, 3);
  const std::vector<RiCase> catalog{
      {&i11, vec({0}), true},         {&i11, vec({1}), false},      {&i11, vec({2}), false},
      {&i33, vec({3}), true},         {&half, vec({-1}), true},     {&half, vec({0}), false},
      {&slab, vec({0, 0}), true},     {&slab, vec({0, 1}), false},  {&slab, vec({0.5, 0}), false},
      {&quadrant, vec({-1, -2}), true}, {&quadrant, vec({-1, 0}), false},
      {&quadrant, vec({0, 0}), false}, {&edge, vec({0, -3}), true}, {&edge, vec({0, 0}), false},
      {&line, vec({3, 2}), true},     {&line, vec({0, 0}), false},  {&tri, vec({0.2, 0.2}), true},
      {&tri, vec({0.5, 0}), false},   {&tri, vec({1, 0}), false},
  };
  int ri_bad = 0;
  for (const RiCase &c : catalog) ri_bad += vrep_ri_membership(*c.set, c.z) != c.expect;
  o.check(ri_bad == 0, "ri catalog");
  o.detail << "LP worst gap " << worst << " (" << infeasible << " infeasible), projection drift "
           << drift << ", ri catalog " << catalog.size() - ri_bad << "/" << catalog.size();
}

void invariants(Outcome &o) {
  gen::Rng rng(7007);
  int closure_bad = 0, domain_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const gen::Instance in = gen::random_nonsmooth_instance(rng);
    const Index n = in.problem.dimension();
    const Vector x = in.y.cwiseProduct(in.y);
    const GeneratorSet s = g_subdiff(in.problem.g(), x);
    Vector c(s.num_coefficients());
    for (Index j = 0; j < c.size(); ++j) c(j) = gen::uniform(rng, 0.0, 1.0);
    c.head(s.num_points()) /= c.head(s.num_points()).sum();
    Vector w = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      if (x(i) == 0.0) w(i) = -gen::uniform(rng, 0.0, 3.0);
    closure_bad += !vrep_membership(s, s.combine(c) + w, 1e-8);

    const Vector z = x + 0.3 * gen::normal_vector(rng, n);
    const bool member = g_eval(in.problem.g(), z).is_finite();
    bool ok = true;
    try {
      (void)g_subdiff(in.problem.g(), z);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::OutOfDomain) throw;
      ok = false;
    }
    domain_bad += member != ok;
  }
  double flip = 0.0;
  for (int t = 0; t < 200; ++t) {
    const gen::Instance in = gen::random_nonsmooth_instance(rng);
    const Vector flipped = gen::random_signs(rng, in.y.size()).cwiseProduct(in.y);
    flip = std::max(flip, std::abs(lifted_residual(in.problem, flipped) -
                                   lifted_residual(in.problem, in.y)));
  }
  o.check(closure_bad == 0, "closure");
  o.check(domain_bad == 0, "domain identity");
  o.check(flip <= 1e-12, "sign flip");
  o.detail << "closure violations " << closure_bad << ", domain violations " << domain_bad
           << ", sign-flip spread " << flip;
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  bool ok = true;
  ok &= run_criterion(1, "residual identity", 30.0, residual_identity);
  ok &= run_criterion(2, "stationarity correspondence", 30.0, correspondence);
  ok &= run_criterion(3, "second subderivative", 10.0, second_subderivative);
  ok &= run_criterion(4, "KL exponents", 20.0, [](Outcome &o) {
    const auto t = Clock::now();
    Outcome quart, strict;
    kl_exponent(quart, false);
    const double tq = since(t);
    kl_exponent(strict, true);
    const double ts = since(t) - tq;
    o.check(quart.passed, "quartic");
    o.check(strict.passed, "strict");
    o.check(tq < 10.0 && ts < 10.0, "per-instance budget");
    o.detail << "quartic: " << quart.detail.str() << " (" << tq << " s); strict: "
             << strict.detail.str() << " (" << ts << " s)";
  });
  ok &= run_criterion(5, "rate dichotomy", 10.0, rates);
  ok &= run_criterion(6, "kernel soundness", 120.0, kernels);
  ok &= run_criterion(7, "structural invariants", 120.0, invariants);
  ok &= run_criterion(8, "full suite runtime", 120.0, [&](Outcome &o) {
    bool self_ok = true;
    for (const auto &r : run_selftest(0)) self_ok &= r.passed;
    o.check(self_ok, "selftest");
    const double total = since(t0);
    o.check(total < 120.0, "total time");
    o.detail << "acceptance plus selftest " << total << " s";
  });
  return ok ? 0 : 1;
}
