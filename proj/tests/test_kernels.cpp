#include "helpers.hpp"

using namespace th;

TEST(ExtendedReal, RejectsNaN) {
  EXPECT_ERROR_KIND(ExtendedReal(std::nan("")), ErrorKind::NumericalFailure);
}

TEST(ExtendedReal, InfiniteArithmetic) {
  const ExtendedReal inf = ExtendedReal::pos_inf();
  EXPECT_TRUE((inf + 3.0).is_pos_inf());
  EXPECT_TRUE((2.0 * inf).is_pos_inf());
  EXPECT_TRUE((0.0 * inf).is_finite());
  EXPECT_ERROR_KIND(inf + ExtendedReal::neg_inf(), ErrorKind::NumericalFailure);
  EXPECT_ERROR_KIND(inf.value(), ErrorKind::NumericalFailure);
  EXPECT_TRUE(ExtendedReal(1.0) < inf);
}

TEST(LP, VertexOfSimplex) {
  LPProblem lp = LPProblem::free_variables(2);
  lp.objective = vec({1, 0});
  lp.lower.setZero();
  lp.add_inequality(vec({1, 1}), 1.0);
  const LPOutcome out = lp_solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value.value(), 1.0, 1e-12);
  EXPECT_NEAR(out.witness->x(), 1.0, 1e-12);
  EXPECT_NEAR(out.witness->y(), 0.0, 1e-12);
}

TEST(LP, EmptyRegionIsInfeasible) {
  LPProblem lp = LPProblem::free_variables(1);
  lp.objective = vec({0});
  lp.lower.setZero();
  lp.add_inequality(vec({1}), -1.0);
  const LPOutcome out = lp_solve(lp);
  EXPECT_EQ(out.status, LPStatus::Infeasible);
  EXPECT_FALSE(out.witness.has_value());
}

TEST(LP, UnboundedRay) {
  LPProblem lp = LPProblem::free_variables(2);
  lp.objective = vec({1, 1});
  lp.lower.setZero();
  lp.add_inequality(vec({1, -1}), 1.0);
  EXPECT_EQ(lp_solve(lp).status, LPStatus::Unbounded);
  EXPECT_TRUE(lp_solve(lp).value.is_pos_inf());
}

TEST(LP, FreeAndBoxedVariables) {
  // max -|z1| style: max z2 s.t. z2 ≤ z1, z2 ≤ -z1, z1 ∈ [-3, 2] free-ish.
  LPProblem lp = LPProblem::free_variables(2);
  lp.objective = vec({0, 1});
  lp.lower(0) = -3;
  lp.upper(0) = 2;
  lp.add_inequality(vec({-1, 1}), 0.0);
  lp.add_inequality(vec({1, 1}), 0.0);
  const LPOutcome out = lp_solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value.value(), 0.0, 1e-12);
}

TEST(LP, UpperBoundOnly) {
  LPProblem lp = LPProblem::free_variables(1);
  lp.objective = vec({-1});
  lp.upper(0) = 5;
  lp.add_inequality(vec({-1}), 2.0); // z ≥ -2
  const LPOutcome out = lp_solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.witness->x(), -2.0, 1e-12);
}

TEST(LP, RedundantEqualities) {
  LPProblem lp = LPProblem::free_variables(3);
  lp.objective = vec({1, 2, 3});
  lp.lower.setZero();
  lp.add_equality(vec({1, 1, 1}), 1.0);
  lp.add_equality(vec({2, 2, 2}), 2.0);
  const LPOutcome out = lp_solve(lp);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(out.value.value(), 3.0, 1e-12);
}

TEST(LP, InconsistentEqualities) {
  LPProblem lp = LPProblem::free_variables(2);
  lp.objective = vec({1, 0});
  lp.add_equality(vec({1, 1}), 1.0);
  lp.add_equality(vec({1, 1}), 2.0);
  EXPECT_EQ(lp_solve(lp).status, LPStatus::Infeasible);
}

TEST(LP, DimensionMismatch) {
  LPProblem lp = LPProblem::free_variables(2);
  lp.objective = vec({1, 0, 0});
  EXPECT_ERROR_KIND(lp_solve(lp), ErrorKind::DimensionMismatch);
}

TEST(LP, IterationCapIsNumericalFailure) {
  LPProblem lp = LPProblem::free_variables(3);
  lp.objective = vec({1, 1, 1});
  lp.lower.setZero();
  lp.add_inequality(vec({1, 2, 3}), 4.0);
  lp.add_inequality(vec({3, 1, 1}), 5.0);
  LPOptions opt;
  opt.max_iterations = 1;
  EXPECT_ERROR_KIND(lp_solve(lp, opt), ErrorKind::NumericalFailure);
}

TEST(LP, DeterministicWitness) {
  gen::Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Polyhedron P = gen::random_bounded_polyhedron(rng, 3, 3);
    LPProblem lp = LPProblem::free_variables(3);
    lp.objective = gen::normal_vector(rng, 3);
    lp.A_ineq = P.A_ineq();
    lp.b_ineq = P.b_ineq();
    const LPOutcome a = lp_solve(lp), b = lp_solve(lp);
    ASSERT_TRUE(a.optimal());
    EXPECT_EQ(*a.witness, *b.witness);
  }
}

TEST(LP, DualityGapAndFeasibility) {
  gen::Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Index n = gen::uniform_int(rng, 1, 6);
    const Polyhedron P = gen::random_bounded_polyhedron(rng, n, gen::uniform_int(rng, 0, 6),
                                                        n > 1 && t % 3 == 0);
    LPProblem lp = LPProblem::free_variables(n);
    lp.objective = gen::normal_vector(rng, n);
    lp.A_ineq = P.A_ineq();
    lp.b_ineq = P.b_ineq();
    lp.A_eq = P.A_eq();
    lp.b_eq = P.b_eq();
    const LPOutcome out = lp_solve(lp);
    ASSERT_TRUE(out.optimal());
    EXPECT_LE(P.max_violation(*out.witness), 1e-9);
    EXPECT_NEAR(out.value.value(), lp.objective.dot(*out.witness), 1e-9);
    EXPECT_LE(std::abs(out.value.value() - out.dual_value), 1e-9);
    EXPECT_LE(out.dual_infeasibility, 1e-9);
  }
}

TEST(LP, AgreesWithVertexEnumeration) {
  gen::Rng rng(3);
  for (int t = 0; t < 150; ++t) {
    const Index n = gen::uniform_int(rng, 1, 5);
    Polyhedron P = Polyhedron::nonnegative_orthant(n);
    P.add_inequality(Vector::Ones(n), 3.0);
    const int m = gen::uniform_int(rng, 1, std::min(10, 15 - static_cast<int>(n)));
    for (int r = 0; r < m; ++r) {
      Vector a(n);
      for (Index i = 0; i < n; ++i) a(i) = gen::uniform(rng, -2, 2);
      P.add_inequality(a, gen::uniform(rng, -1, 2));
    }
    LPProblem lp = LPProblem::free_variables(n);
    for (Index i = 0; i < n; ++i) lp.objective(i) = gen::uniform(rng, -2, 2);
    lp.A_ineq = P.A_ineq();
    lp.b_ineq = P.b_ineq();
    const auto verts = oracles::enumerate_vertices(P, false);
    const LPOutcome out = lp_solve(lp);
    if (verts.empty()) {
      EXPECT_EQ(out.status, LPStatus::Infeasible);
      continue;
    }
    ASSERT_TRUE(out.optimal());
    double best = -1e300;
    for (const auto &v : verts) best = std::max(best, lp.objective.dot(v));
    EXPECT_NEAR(out.value.value(), best, 1e-9);
  }
}

TEST(QP, BoxConstrainedQuadratic) {
  // min ½‖c − (2, −1)‖² over 0 ≤ c ≤ 1.
  QPProblem qp;
  qp.G = Matrix::Identity(2, 2);
  qp.g = vec({-2, 1});
  qp.A_eq = Matrix(0, 2);
  qp.b_eq = Vector(0);
  qp.A_ineq = mat({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
  qp.b_ineq = vec({1, 1, 0, 0});
  const QPResult r = qp_solve_active_set(qp, vec({0.5, 0.5}));
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 0.0, 1e-12);
  EXPECT_LE(r.stationarity, 1e-10);
  EXPECT_GE(r.multipliers_ineq.minCoeff(), -1e-12);
}

TEST(QP, SingularHessianWithEquality) {
  // min (c1 + c2 − 1)² s.t. c1 − c2 = 0: any minimizer has c1 = c2 = ½.
  QPProblem qp;
  qp.G = 2.0 * mat({{1, 1}, {1, 1}});
  qp.g = vec({-2, -2});
  qp.A_eq = mat({{1, -1}});
  qp.b_eq = vec({0});
  qp.A_ineq = Matrix(0, 2);
  qp.b_ineq = Vector(0);
  const QPResult r = qp_solve_active_set(qp, vec({0, 0}));
  EXPECT_NEAR(r.x(0), 0.5, 1e-10);
  EXPECT_NEAR(r.x(1), 0.5, 1e-10);
}

TEST(QP, InfeasibleStartRejected) {
  QPProblem qp;
  qp.G = Matrix::Identity(1, 1);
  qp.g = vec({0});
  qp.A_eq = Matrix(0, 1);
  qp.b_eq = Vector(0);
  qp.A_ineq = mat({{1}});
  qp.b_ineq = vec({0});
  EXPECT_ANY_THROW(qp_solve_active_set(qp, vec({1})));
}
