#include "helpers.hpp"

#include <cmath>

using namespace th;

TEST(StrictComplementarity, Examples) {
  EXPECT_FALSE(strict_complementarity(quartic(), vec({0})));
  EXPECT_TRUE(strict_complementarity(nnls1(), vec({1})));
  EXPECT_TRUE(strict_complementarity(orthant2(), vec({1, 0})));
  EXPECT_TRUE(strict_complementarity(simplex_linear(), vec({1, 0})));
}

TEST(StrictComplementarity, Errors) {
  EXPECT_ERROR_KIND(strict_complementarity(nnls1(), vec({-1})), ErrorKind::OutOfDomain);
  EXPECT_ERROR_KIND(strict_complementarity(nnls1(), vec({0})), ErrorKind::NotAStationaryPoint);
  EXPECT_ERROR_KIND(strict_complementarity(nnls1(), vec({1, 0})), ErrorKind::DimensionMismatch);
}

TEST(PredictExponent, Examples) {
  EXPECT_DOUBLE_EQ(predict_exponent({0.3, std::nullopt, true}), 0.5);
  EXPECT_DOUBLE_EQ(predict_exponent({0.7, std::nullopt, true}), 0.7);
  EXPECT_DOUBLE_EQ(predict_exponent({0.5, 1.0, false}), 0.75);
  EXPECT_DOUBLE_EQ(predict_exponent({0.5, 0.5, false}), 0.875);
}

TEST(PredictExponent, Errors) {
  EXPECT_ERROR_KIND(predict_exponent({0.0, std::nullopt, true}), ErrorKind::InvalidRange);
  EXPECT_ERROR_KIND(predict_exponent({1.0, std::nullopt, true}), ErrorKind::InvalidRange);
  EXPECT_ERROR_KIND(predict_exponent({0.5, std::nullopt, false}), ErrorKind::InvalidRange);
  EXPECT_ERROR_KIND(predict_exponent({0.5, 0.0, false}), ErrorKind::InvalidRange);
  EXPECT_ERROR_KIND(predict_exponent({0.5, 1.5, false}), ErrorKind::InvalidRange);
}

TEST(PredictExponent, RangeAndMonotonicity) {
  for (double a = 0.05; a < 1.0; a += 0.05) {
    double prev = -1.0;
    for (double g = 0.1; g <= 1.0 + 1e-12; g += 0.1) {
      const double e = predict_exponent({a, g, false});
      EXPECT_GE(e, 0.5);
      EXPECT_LT(e, 1.0);
      EXPECT_GE(e, a - 1e-15);
      // Larger gamma weakens the exponent toward (1+α)/2.
      if (prev >= 0.0) EXPECT_LE(e, prev + 1e-15);
      prev = e;
    }
    const double s = predict_exponent({a, std::nullopt, true});
    EXPECT_GE(s, 0.5);
    EXPECT_GE(s, a);
  }
}

TEST(Scatter, QuarticExactRelation) {
  const auto s = sample_scatter(quartic(), vec({0}));
  ASSERT_GT(s.size(), 100u);
  for (const auto &p : s)
    EXPECT_NEAR(p.residual, 2.0 * std::pow(2.0 * p.gap, 0.75), 1e-9 * p.residual);
}

TEST(Scatter, StrictRatioTendsToLimit) {
  ScatterConfig cfg;
  cfg.delta_min = 1e-7;
  cfg.delta_max = 1e-5;
  const auto s = sample_scatter(nnls1(), vec({1}), cfg);
  for (const auto &p : s)
    EXPECT_NEAR(p.residual / std::sqrt(p.gap), 2.0 * std::sqrt(2.0), 1e-2);
}

TEST(Scatter, SortedValidAndDeterministic) {
  ScatterConfig cfg;
  cfg.seed = 5;
  const auto a = sample_scatter(orthant2(), vec({1, 0}), cfg);
  const auto b = sample_scatter(orthant2(), vec({1, 0}), cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].gap, b[i].gap);
    EXPECT_EQ(a[i].residual, b[i].residual);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_GT(a[i].gap, 0.0);
    EXPECT_GE(a[i].y(0), 0.0);
    if (i) EXPECT_LE(a[i - 1].gap, a[i].gap);
    EXPECT_NEAR(a[i].gap, lift_eval(orthant2(), a[i].y).value() - lift_eval(orthant2(), vec({1, 0})).value(),
                1e-15);
    EXPECT_NEAR(a[i].residual, lifted_residual(orthant2(), a[i].y), 0.0);
  }
}

TEST(Scatter, Errors) {
  EXPECT_ERROR_KIND(sample_scatter(nnls1(), vec({0.5})), ErrorKind::NotAStationaryPoint);
  EXPECT_ERROR_KIND(sample_scatter(simplex_linear(), vec({1, 1})), ErrorKind::OutOfLiftedDomain);
  ScatterConfig bad;
  bad.delta_min = 1e-2;
  bad.delta_max = 1e-3;
  EXPECT_ERROR_KIND(sample_scatter(nnls1(), vec({1}), bad), ErrorKind::InvalidRange);
  ScatterConfig tiny;
  tiny.delta_min = 1e-30;
  tiny.delta_max = 1e-29;
  EXPECT_ERROR_KIND(sample_scatter(nnls1(), vec({1}), tiny), ErrorKind::InsufficientSamples);
}

TEST(EstimateExponent, QuarticNonstrict) {
  KLFitConfig cfg;
  cfg.inputs = ExponentInputs{0.5, 1.0, false};
  const KLFitReport r = estimate_exponent(quartic(), vec({0}), cfg);
  EXPECT_GE(r.alpha_hat, 0.70);
  EXPECT_LE(r.alpha_hat, 0.80);
  EXPECT_DOUBLE_EQ(*r.predicted, 0.75);
  EXPECT_TRUE(*r.verdict);
  EXPECT_GE(r.bin_minima.size(), 8u);
}

TEST(EstimateExponent, StrictInstance) {
  KLFitConfig cfg;
  cfg.inputs = ExponentInputs{0.5, std::nullopt, true};
  const KLFitReport r = estimate_exponent(nnls1(), vec({1}), cfg);
  EXPECT_GE(r.alpha_hat, 0.45);
  EXPECT_LE(r.alpha_hat, 0.55);
  EXPECT_DOUBLE_EQ(*r.predicted, 0.5);
  EXPECT_TRUE(*r.verdict);
}

TEST(EstimateExponent, OrthantBoundaryMinimizer) {
  const KLFitReport r = estimate_exponent(orthant2(), vec({1, 0}));
  EXPECT_GE(r.alpha_hat, 0.45);
  EXPECT_LE(r.alpha_hat, 0.55);
  EXPECT_FALSE(r.predicted.has_value());
}

TEST(FitLowerEnvelope, PowerLawRecovered) {
  std::vector<ScatterSample> s;
  for (int i = 0; i < 200; ++i) {
    const double gap = std::pow(10.0, -8.0 + 6.0 * i / 199.0);
    s.push_back({gap, 3.0 * std::pow(gap, 0.6), Vector()});
    s.push_back({gap, 10.0 * std::pow(gap, 0.6), Vector()});
  }
  const KLFitReport r = fit_lower_envelope(s);
  EXPECT_NEAR(r.alpha_hat, 0.6, 1e-9);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-9);
  EXPECT_ERROR_KIND(fit_lower_envelope({}), ErrorKind::InsufficientSamples);
  EXPECT_ERROR_KIND(fit_lower_envelope({s.begin(), s.begin() + 4}), ErrorKind::InsufficientSamples);
}

TEST(ErrorBoundProbe, QuarticRatio) {
  EXPECT_NEAR(error_bound_probe(quartic(), vec({0}), 0.5), std::pow(2.0, 1.5), 1e-6);
}

TEST(ErrorBoundProbe, StrictRatio) {
  // Radii where the rounding error of the gap stays below 1e-7 relative.
  ErrorBoundProbeConfig cfg;
  cfg.scatter.delta_min = 1e-4;
  EXPECT_NEAR(error_bound_probe(nnls1(), vec({1}), 0.0, cfg), 2.0, 1e-6);
}

TEST(ErrorBoundProbe, Errors) {
  const QuadraticProblem concave(SmoothQuadratic(mat({{-1}}), vec({0}), 0.0),
                                 PolyhedralFunction::nonnegative_indicator(1));
  EXPECT_ERROR_KIND(error_bound_probe(concave, vec({0}), 0.5), ErrorKind::NotConvex);
  EXPECT_ERROR_KIND(error_bound_probe(nnls1(), vec({0}), 0.5), ErrorKind::NotAMinimizer);
  EXPECT_ERROR_KIND(error_bound_probe(nnls1(), vec({1}), 1.0), ErrorKind::InvalidRange);
  ErrorBoundProbeConfig tiny;
  tiny.scatter.delta_min = 1e-30;
  tiny.scatter.delta_max = 1e-29;
  EXPECT_ERROR_KIND(error_bound_probe(nnls1(), vec({1}), 0.0, tiny), ErrorKind::InsufficientSamples);
}
