#include "seasonal_ruin/boundary.hpp"
#include "seasonal_ruin/roots.hpp"

#include "common.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

using namespace seasonal_ruin;
using cd = std::complex<double>;

namespace {

bool has_root(const RootSet<double>& rs, cd value, double tol, int multiplicity = 1) {
  return std::any_of(rs.roots.begin(), rs.roots.end(), [&](const Root<double>& r) {
    return std::abs(r.value - value) < tol && r.multiplicity == multiplicity;
  });
}

// every non-real root has its conjugate in the set with the same multiplicity
void expect_conjugate_closed(const RootSet<double>& rs, double tol) {
  for (const auto& r : rs.roots) {
    if (std::abs(r.value.imag()) < tol) continue;
    EXPECT_TRUE(has_root(rs, std::conj(r.value), tol, r.multiplicity)) << r.value;
  }
}

}  // namespace

TEST(Roots, NetProfitMargin) {
  EXPECT_NEAR(net_profit_margin(testing_support::fixture("example1")), 1.0, 1e-15);
  EXPECT_NEAR(net_profit_margin(testing_support::fixture("example4")), 55991.0 / 27720.0, 1e-12);
  EXPECT_NEAR(net_profit_margin(RiskModel(1, {DiscreteDist::constant(1)})), 0.0, 1e-15);
}

TEST(Roots, ExampleOne) {
  auto rs = isolate_roots(testing_support::fixture("example1"));
  EXPECT_EQ(rs.total_with_multiplicity, 3);
  EXPECT_EQ(rs.roots.size(), 3u);
  EXPECT_TRUE(has_root(rs, {-0.3605, 0.0}, 1e-4));
  EXPECT_TRUE(has_root(rs, {-0.1294, 0.4087}, 1e-4));
  EXPECT_TRUE(has_root(rs, {-0.1294, -0.4087}, 1e-4));
  for (const auto& r : rs.roots) EXPECT_LE(r.residual, 1e-10);
  expect_conjugate_closed(rs, 1e-9);
}

TEST(Roots, ExampleTwoHasDoubleZero) {
  auto rs = isolate_roots(testing_support::fixture("example2"));
  EXPECT_EQ(rs.total_with_multiplicity, 3);
  auto nz = rs.nonzero();
  ASSERT_EQ(nz.size(), 1u);
  EXPECT_NEAR(nz[0].value.real(), -0.2928, 1e-4);
  EXPECT_NEAR(nz[0].value.imag(), 0.0, 1e-12);
  auto zero = std::find_if(rs.roots.begin(), rs.roots.end(), [](const auto& r) { return r.at_zero; });
  ASSERT_NE(zero, rs.roots.end());
  EXPECT_EQ(zero->multiplicity, 2);
}

TEST(Roots, ExampleThreeDoubleRoot) {
  auto rs = isolate_roots(testing_support::fixture("example3"));
  EXPECT_EQ(rs.total_with_multiplicity, 5);
  EXPECT_TRUE(has_root(rs, {-4.0 / 11.0, 0.0}, 1e-7, 2));
  EXPECT_TRUE(has_root(rs, {-0.2250, 0.0}, 1e-4));
  EXPECT_TRUE(has_root(rs, {-0.0154, 0.7423}, 1e-4));
  EXPECT_TRUE(has_root(rs, {-0.0154, -0.7423}, 1e-4));
  for (const auto& r : rs.roots) {
    EXPECT_TRUE(r.multiplicity_confirmed);
    EXPECT_LE(r.residual, r.multiplicity > 1 ? 1e-6 : 1e-10);
  }
}

TEST(Roots, ExampleThreeRefinedInHighPrecision) {
  auto rs = characteristic_roots<real50>(testing_support::fixture("example3"));
  bool found = false;
  for (const auto& r : rs.roots) {
    if (r.multiplicity == 2) {
      found = true;
      EXPECT_LT(to_double(cabs<real50>(r.value - complex_t<real50>(real50(-4) / 11))), 1e-20);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Roots, ExampleFourFortyNineSimple) {
  auto rs = isolate_roots(testing_support::fixture("example4"));
  EXPECT_EQ(rs.total_with_multiplicity, 49);
  EXPECT_EQ(rs.roots.size(), 49u);
  for (const auto& r : rs.roots) {
    EXPECT_EQ(r.multiplicity, 1);
    EXPECT_LE(std::abs(r.value), 1.0);
    EXPECT_LE(r.residual, 1e-10);
  }
  expect_conjugate_closed(rs, 1e-9);
  // distinct at the tolerance used for clustering
  std::vector<cd> raw;
  for (const auto& r : rs.roots) raw.push_back(r.value);
  EXPECT_EQ(cluster_multiplicities(raw, 1e-7).roots.size(), 49u);
}

TEST(Roots, Clustering) {
  auto a = cluster_multiplicities({-0.3636363, -0.3636364}, 1e-5);
  ASSERT_EQ(a.roots.size(), 1u);
  EXPECT_EQ(a.roots[0].multiplicity, 2);
  EXPECT_NEAR(a.roots[0].value.real(), -4.0 / 11.0, 1e-6);

  auto b = cluster_multiplicities({{0.0, 0.5}, {0.0, -0.5}}, 1e-9);
  ASSERT_EQ(b.roots.size(), 2u);
  EXPECT_EQ(b.roots[0].multiplicity, 1);
  EXPECT_EQ(b.roots[1].multiplicity, 1);
}

TEST(Roots, NoNetProfitRejected) {
  RiskModel sup(1, {DiscreteDist::constant(2)});
  EXPECT_THROW(isolate_roots(sup), NetProfitViolated);
}

TEST(Roots, PoissonBranchMatchesCompanion) {
  // the same law as a truncated table goes through the companion path
  RiskModel p(2, {DiscreteDist::poisson(1.0), DiscreteDist::poisson(2.0)});
  auto t = truncate(DiscreteDist::poisson(3.0), 1e-16);
  RiskModel q(4, {DiscreteDist::table(t.probs)});
  auto rp = isolate_roots(p);
  auto rq = isolate_roots(q);
  ASSERT_EQ(rp.roots.size(), rq.roots.size());
  for (const auto& r : rp.roots) EXPECT_TRUE(has_root(rq, r.value, 1e-9));
}

TEST(Roots, RandomModelsRootCount) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto model = random_model(rng, 3, 3);
    auto rs = isolate_roots(model);
    EXPECT_EQ(rs.total_with_multiplicity, model.cycle_premium() - 1);
    for (const auto& r : rs.roots) {
      EXPECT_LE(std::abs(r.value), 1.0 + 1e-6);
      EXPECT_GT(std::abs(r.value - 1.0), 1e-8);
      EXPECT_LE(r.residual, r.multiplicity > 1 ? 1e-6 : 1e-10);
    }
    expect_conjugate_closed(rs, 1e-8);
  }
}
