#include "sqlift/sqlift.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace sqlift;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
  case ErrorKind::ParseError:
    return 2;
  case ErrorKind::ValidationError:
  case ErrorKind::DimensionMismatch:
  case ErrorKind::OutOfDomain:
  case ErrorKind::OutOfLiftedDomain:
  case ErrorKind::InvalidRange:
  case ErrorKind::NotAStationaryPoint:
  case ErrorKind::NotConvex:
  case ErrorKind::NotAMinimizer:
  case ErrorKind::UnsupportedProblemClass:
  case ErrorKind::InfeasiblePolyhedron:
  case ErrorKind::EmptySet:
    return 3;
  case ErrorKind::InconsistencyDetected:
    return 5;
  default:
    return 4;
  }
}

std::string fmt(double v) { return io::format_double(v); }

std::string fmt(const Vector &v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + "]";
}

std::string fmt(const std::vector<Index> &idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ", " : "") + std::to_string(idx[i]);
  return s + "}";
}

const char *yes(bool b) { return b ? "true" : "false"; }

Vector point_arg(const std::vector<double> &v, Index n, const char *flag) {
  if (static_cast<Index>(v.size()) != n)
    throw Error(ErrorKind::ValidationError,
                std::string(flag) + " needs " + std::to_string(n) + " values, got " +
                    std::to_string(v.size()));
  return from_std(v);
}

void print_problem_header(const io::ProblemFile &pf, const std::string &path) {
  std::cout << "problem: " << (pf.meta.name ? *pf.meta.name : path) << " (n = "
            << pf.problem.dimension() << ", pieces = " << pf.problem.g().pieces().size()
            << ")\n";
}

int cmd_certify(const std::string &path, const std::vector<double> &yv, std::uint64_t seed) {
  const io::ProblemFile pf = io::parse_problem_file(path);
  const auto &p = pf.problem;
  const Vector y = point_arg(yv, p.dimension(), "--y");
  print_problem_header(pf, path);
  const StationarityReport fo = classify_first_order(p, y);
  std::cout << "y: " << fmt(y) << "\n"
            << "x = y^2: " << fmt(Vector(y.cwiseProduct(y))) << "\n"
            << "in_domain: " << yes(fo.in_domain) << "\n"
            << "support: " << fmt(fo.split.support) << "\n";
  if (fo.min_abs_on_support) std::cout << "min_abs_on_support: " << fmt(*fo.min_abs_on_support) << "\n";
  if (!fo.in_domain) throw Error(ErrorKind::OutOfLiftedDomain, "y^2 is outside dom g");
  std::cout << "lifted_residual: " << fmt(*fo.lifted_residual) << "\n"
            << "phi_residual: " << fmt(*fo.phi_residual) << "\n"
            << "near_degenerate: " << yes(fo.near_degenerate) << "\n";
  CorrespondenceOptions opt;
  opt.seed = seed;
  opt.throw_on_inconsistency = false;
  const CorrespondenceReport rep = correspondence_check(p, y, opt);
  std::cout << "stationary_for_Phi: " << yes(rep.stationary_for_Phi) << "\n"
            << "second_order_nonneg_on_SI: " << yes(rep.second_order_nonneg_on_SI) << "\n"
            << "stationary_for_phi: " << yes(rep.stationary_for_phi) << "\n";
  if (rep.witness_lambda) std::cout << "witness_lambda: " << fmt(*rep.witness_lambda) << "\n";
  if (rep.negative_direction) {
    const ExtendedReal d2 = d2_lifted_objective_on_SI(p, y, *rep.negative_direction);
    std::cout << "negative_direction: " << fmt(*rep.negative_direction) << " (d2 = " << d2
              << ")\n";
  }
  if (rep.stationary_for_Phi && !rep.stationary_for_phi)
    std::cout << "verdict: spurious lifted stationary point\n";
  else if (rep.stationary_for_Phi)
    std::cout << "verdict: lifted stationary point of a stationary point of phi\n";
  else
    std::cout << "verdict: not stationary for the lifted problem\n";
  std::cout << "consistent: " << yes(rep.consistent) << "\n";
  if (!rep.consistent)
    throw Error(ErrorKind::InconsistencyDetected,
                "lifted second-order certificate disagrees with phi-stationarity");
  return 0;
}

int cmd_strict(const std::string &path, const std::vector<double> &xv) {
  const io::ProblemFile pf = io::parse_problem_file(path);
  const Vector x = point_arg(xv, pf.problem.dimension(), "--x");
  print_problem_header(pf, path);
  const bool sc = strict_complementarity(pf.problem, x);
  const ExtendedReal margin = vrep_ri_margin(phi_subdiff(pf.problem, x), Vector::Zero(x.size()));
  std::cout << "x: " << fmt(x) << "\n"
            << "phi_residual: " << fmt(phi_residual(pf.problem, x)) << "\n"
            << "ri_margin: " << margin << "\n"
            << "strict_complementarity: " << yes(sc) << "\n";
  return 0;
}

struct KLArgs {
  std::vector<double> y;
  std::optional<double> alpha, gamma;
  bool strict = false;
  std::uint64_t seed = 0;
  double dmin = 1e-6, dmax = 1e-2;
  int dirs = 32, radii = 64;
  std::string out;
};

int cmd_kl(const std::string &path, const KLArgs &a) {
  const io::ProblemFile pf = io::parse_problem_file(path);
  const Vector y = point_arg(a.y, pf.problem.dimension(), "--y");
  print_problem_header(pf, path);
  KLFitConfig cfg;
  cfg.scatter.delta_min = a.dmin;
  cfg.scatter.delta_max = a.dmax;
  cfg.scatter.n_dirs = a.dirs;
  cfg.scatter.n_radii = a.radii;
  cfg.scatter.seed = a.seed;
  const std::optional<double> alpha = a.alpha ? a.alpha : pf.meta.known_alpha;
  const std::optional<double> gamma = a.gamma ? a.gamma : pf.meta.known_gamma;
  if (alpha) cfg.inputs = ExponentInputs{*alpha, gamma, a.strict};
  const auto samples = sample_scatter(pf.problem, y, cfg.scatter);
  const KLFitReport rep = fit_lower_envelope(samples, cfg);
  std::cout << "seed: " << a.seed << "\n"
            << "delta_range: [" << fmt(a.dmin) << ", " << fmt(a.dmax) << "]\n"
            << "samples: " << rep.n_samples << "\n"
            << "gap_range: [" << fmt(rep.gap_range.first) << ", " << fmt(rep.gap_range.second)
            << "]\n"
            << "nonempty_bins: " << rep.bin_minima.size() << "\n"
            << "alpha_hat: " << fmt(rep.alpha_hat) << "\n"
            << "r_squared: " << fmt(rep.r_squared) << "\n";
  if (rep.predicted) {
    std::cout << "predicted: " << fmt(*rep.predicted) << "\n"
              << "within_tolerance: " << yes(*rep.verdict) << "\n";
  }
  if (!a.out.empty()) {
    io::CsvTable t;
    t.comments = {"seed=" + std::to_string(a.seed), "delta_min=" + fmt(a.dmin),
                  "delta_max=" + fmt(a.dmax)};
    t.header = {"gap", "residual"};
    for (const auto &s : samples) t.rows.push_back({s.gap, s.residual});
    io::emit_csv(t, a.out);
  }
  return 0;
}

struct SolveArgs {
  std::string variant = "lifted";
  std::vector<double> start;
  int steps = 1000;
  std::optional<double> fstar;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_solve(const std::string &path, const SolveArgs &a) {
  const io::ProblemFile pf = io::parse_problem_file(path);
  if (a.variant != "original" && a.variant != "lifted")
    throw Error(ErrorKind::ValidationError, "--variant must be original or lifted");
  const Variant v = a.variant == "original" ? Variant::Original : Variant::Lifted;
  const Vector start = point_arg(a.start, pf.problem.dimension(), v == Variant::Original ? "--x0" : "--y0");
  print_problem_header(pf, path);
  FirstOrderOptions opt;
  opt.steps = a.steps;
  opt.reference_value = a.fstar;
  opt.seed = a.seed;
  SolverTrace tr = run_first_order(pf.problem, v, start, opt);
  std::cout << "variant: " << to_string(v) << "\n"
            << "steps: " << a.steps << "\n"
            << "final_point: " << fmt(tr.final_point) << "\n"
            << "final_value: " << fmt(tr.iterates.back().value) << "\n"
            << "reference_value: " << fmt(tr.reference_value) << "\n";
  try {
    const RateFit r = fit_rate(tr);
    tr.rate = r;
    if (r.kind == RateKind::Linear)
      std::cout << "rate: linear, rho = " << fmt(r.parameter) << "\n";
    else
      std::cout << "rate: sublinear, p = " << fmt(r.parameter) << "\n";
    std::cout << "rate_r_squared: linear " << fmt(r.r_squared_linear) << ", power "
              << fmt(r.r_squared_power) << "\n";
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::InsufficientTrace) throw;
    std::cout << "rate: undetermined (" << e.what() << ")\n";
  }
  if (!a.out.empty()) {
    io::CsvTable t;
    t.comments = {"seed=" + std::to_string(a.seed), "variant=" + a.variant};
    t.header = {"k", "value", "gap", "residual", "step"};
    for (const auto &it : tr.iterates)
      t.rows.push_back({static_cast<double>(it.k), it.value, it.gap, it.residual, it.step});
    io::emit_csv(t, a.out);
  }
  return 0;
}

int cmd_selftest(std::uint64_t seed) {
  bool ok = true;
  for (const auto &r : run_selftest(seed)) {
    std::printf("%s %-38s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    ok &= r.passed;
  }
  if (!ok) throw Error(ErrorKind::InconsistencyDetected, "self-test failed");
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Square-lift certification and KL experiments for polyhedral composite problems"};
  app.require_subcommand(1);

  std::string file;
  std::uint64_t seed = 0;

  std::vector<double> cert_y;
  auto *certify = app.add_subcommand("certify", "first- and second-order report at a lifted point");
  certify->add_option("file", file, "problem file (JSON)")->required();
  certify->add_option("--y", cert_y, "lifted point")->required()->delimiter(',');
  certify->add_option("--seed", seed, "seed for sampled directions");

  std::vector<double> sc_x;
  auto *strict = app.add_subcommand("strict-comp", "test 0 ∈ ri ∂φ(x)");
  strict->add_option("file", file, "problem file (JSON)")->required();
  strict->add_option("--x", sc_x, "stationary point of φ")->required()->delimiter(',');

  KLArgs kl;
  auto *klfit = app.add_subcommand("kl-fit", "estimate the KL exponent of the lift at y");
  klfit->add_option("file", file, "problem file (JSON)")->required();
  klfit->add_option("--y", kl.y, "lifted stationary point")->required()->delimiter(',');
  klfit->add_option("--alpha", kl.alpha, "KL exponent of φ (for the prediction)");
  klfit->add_option("--gamma", kl.gamma, "error-bound exponent (nonstrict prediction)");
  klfit->add_flag("--strict", kl.strict, "assume strict complementarity in the prediction");
  klfit->add_option("--seed", kl.seed, "sampling seed");
  klfit->add_option("--dmin", kl.dmin, "smallest perturbation radius");
  klfit->add_option("--dmax", kl.dmax, "largest perturbation radius");
  klfit->add_option("--dirs", kl.dirs, "directions per radius");
  klfit->add_option("--radii", kl.radii, "number of radii");
  klfit->add_option("--out", kl.out, "CSV of (gap, residual) samples; - for stdout");

  SolveArgs sv;
  auto *solve = app.add_subcommand("solve", "first-order descent on φ or on its lift");
  solve->add_option("file", file, "problem file (JSON)")->required();
  solve->add_option("--variant", sv.variant, "original | lifted")
      ->check(CLI::IsMember({"original", "lifted"}));
  auto *y0 = solve->add_option("--y0", sv.start, "lifted start")->delimiter(',');
  auto *x0 = solve->add_option("--x0", sv.start, "original start")->delimiter(',');
  y0->excludes(x0);
  solve->add_option("--steps", sv.steps, "iterations");
  solve->add_option("--fstar", sv.fstar, "best-known optimal value");
  solve->add_option("--seed", sv.seed, "seed for the spectral estimate");
  solve->add_option("--out", sv.out, "CSV trace; - for stdout");

  auto *self = app.add_subcommand("selftest", "oracle-agreement suite");
  self->add_option("--seed", seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*certify) return cmd_certify(file, cert_y, seed);
    if (*strict) return cmd_strict(file, sc_x);
    if (*klfit) return cmd_kl(file, kl);
    if (*solve) {
      if (sv.start.empty()) throw Error(ErrorKind::ValidationError, "solve needs --y0 or --x0");
      return cmd_solve(file, sv);
    }
    if (*self) return cmd_selftest(seed);
  } catch (const Error &e) {
    std::cout.flush();
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception &e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
