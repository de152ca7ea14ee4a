#include "seasonal_ruin/boundary.hpp"
#include "seasonal_ruin/linalg.hpp"

#include "common.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace seasonal_ruin;

namespace {

BoundaryMasses<double> solve_fixture(const std::string& name) {
  auto model = testing_support::fixture(name);
  return solve_boundary<double>(model, characteristic_roots<double>(model));
}

int count_rows(const AssembledSystem<double>& sys, RowTag::Kind kind) {
  return static_cast<int>(std::count_if(sys.row_tags.begin(), sys.row_tags.end(),
                                        [kind](const RowTag& t) { return t.kind == kind; }));
}

// phi(1) for N = 1, kappa = 1 by iterating phi <- T phi on a long grid
double value_iteration_phi1(const std::vector<double>& x) {
  const std::size_t width = 4000;
  std::vector<double> phi(width, 1.0), next(width);
  phi[0] = 0.0;
  for (int it = 0; it < 20000; ++it) {
    next[0] = 0.0;
    for (std::size_t u = 1; u < width; ++u) {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size() && i <= u; ++i) acc += x[i] * (u + 1 - i < width ? phi[u + 1 - i] : 1.0);
      next[u] = acc;
    }
    phi.swap(next);
  }
  return phi[1];
}

}  // namespace

TEST(Boundary, ExampleOneSystem) {
  auto model = testing_support::fixture("example1");
  auto sys = build_system<double>(model, characteristic_roots<double>(model));
  EXPECT_EQ(sys.size, 4u);
  EXPECT_EQ(count_rows(sys, RowTag::Kind::MeanEquation), 1);
  auto b = solve_boundary<double>(model, characteristic_roots<double>(model));
  EXPECT_NEAR(b(1, 0), 0.6501, 5e-5);
  EXPECT_NEAR(b(1, 1), 0.1395, 5e-5);
  EXPECT_NEAR(b(2, 0), 0.5083, 5e-5);
  EXPECT_NEAR(b(2, 1), 0.1855, 5e-5);
  EXPECT_LT(b.max_imaginary, 1e-12);
  for (double r : boundary_residuals(sys, b)) EXPECT_LT(r, 1e-12);
}

TEST(Boundary, ExampleTwoZeroColumnReduction) {
  auto model = testing_support::fixture("example2");
  auto sys = build_system<double>(model, characteristic_roots<double>(model));
  ASSERT_EQ(sys.size, 2u);
  EXPECT_EQ(sys.removed.size(), 2u);
  auto b = solve_fixture("example2");
  EXPECT_NEAR(b(1, 0), 0.1270, 5e-5);
  EXPECT_NEAR(b(2, 0), 0.1315, 5e-5);
  EXPECT_EQ(b.status[0][0], MassStatus::Solved);
  EXPECT_NE(b.status[0][1], MassStatus::Solved);
}

TEST(Boundary, ExampleThreeDerivativeRow) {
  auto model = testing_support::fixture("example3");
  auto sys = build_system<double>(model, characteristic_roots<double>(model));
  ASSERT_EQ(sys.size, 6u);
  EXPECT_EQ(count_rows(sys, RowTag::Kind::Derivative), 1);
  auto b = solve_fixture("example3");
  const double expect[2][3] = {{0.9984, 0.0016, 0.0}, {1.0, 0.0, 0.0}};
  for (long j = 1; j <= 2; ++j) {
    for (long i = 0; i < 3; ++i) EXPECT_NEAR(b(j, i), expect[j - 1][i], 1e-10) << j << "," << i;
  }
}

TEST(Boundary, ExampleFourBlockOne) {
  auto b = solve_fixture("example4");
  const double expect[] = {0.1821, 0.0604, 0.0583, 0.0545, 0.0504};
  for (long i = 0; i < 5; ++i) EXPECT_NEAR(b(1, i), expect[i], 5e-5);
}

TEST(Boundary, SinglePeriodClassicalValue) {
  // N = 1, kappa = 1: m_0 = (1 - EX) / x_0, cross-checked by value iteration
  const std::vector<double> x = {0.6, 0.1, 0.3};
  RiskModel model(1, {DiscreteDist::table(x)});
  auto sys = build_system<double>(model, characteristic_roots<double>(model));
  ASSERT_EQ(sys.size, 1u);
  EXPECT_NEAR(std::abs(sys.at(0, 0)), 0.6, 1e-15);
  auto b = solve_boundary<double>(model, characteristic_roots<double>(model));
  EXPECT_NEAR(b(1, 0), (1.0 - 0.7) / 0.6, 1e-14);
  EXPECT_NEAR(b(1, 0), value_iteration_phi1(x), 1e-9);
}

TEST(Boundary, RowPermutationInvariance) {
  auto model = testing_support::fixture("example4");
  auto sys = build_system<double>(model, characteristic_roots<double>(model));
  const auto n = sys.size;
  auto x = lu_factor<double>(sys.matrix, n).solve(sys.rhs);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<complex_t<double>> pa(n * n), pb(n);
  for (std::size_t r = 0; r < n; ++r) {
    pb[r] = sys.rhs[perm[r]];
    for (std::size_t c = 0; c < n; ++c) pa[r * n + c] = sys.at(perm[r], c);
  }
  auto y = lu_factor<double>(pa, n).solve(pb);
  for (std::size_t c = 0; c < n; ++c) EXPECT_NEAR(std::abs(x[c] - y[c]), 0.0, 1e-9);
}

TEST(Boundary, LowerBoundsFixedPoint) {
  // shifts of one per season with kappa = 2 leave no forced gap
  EXPECT_EQ(supremum_lower_bounds(testing_support::fixture("example2")), (std::vector<long>{0, 0}));
  // X_2 always exceeds kappa, so the walk started in season 2 has M_2 >= 1
  RiskModel m(1, {DiscreteDist::constant(0), DiscreteDist::table({0.0, 0.0, 0.5, 0.5})});
  EXPECT_EQ(supremum_lower_bounds(m), (std::vector<long>{0, 1}));
}

TEST(Boundary, ProbeFindsNoSingularSystems) {
  auto rep = probe_conjecture(3, 3, 100, 42);
  EXPECT_EQ(rep.trials, 100);
  EXPECT_EQ(rep.evaluated, 100);
  EXPECT_EQ(rep.singular_instances, 0);
  EXPECT_TRUE(rep.findings.empty());
}

TEST(Boundary, ProbeSinglePeriodDeterminant) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto model = random_model(rng, 1, 1);
    auto sys = build_system<double>(model, characteristic_roots<double>(model));
    ASSERT_EQ(sys.size, 1u);
    EXPECT_NEAR(lu_factor<double>(sys.matrix, 1).det().real(), pmf(model.seasons[0], 0), 1e-15);
  }
}

TEST(Boundary, ProbeRejectsZeroTrials) { EXPECT_THROW(probe_conjecture(2, 2, 0, 1), std::invalid_argument); }
