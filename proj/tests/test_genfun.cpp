#include "seasonal_ruin/genfun.hpp"

#include "common.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace seasonal_ruin;
using testing_support::fixture;
using cd = std::complex<double>;

TEST(GenFun, SeriesMatchesSurvival) {
  for (const char* name : {"example1", "example2", "example3", "example4"}) {
    auto model = fixture(name);
    auto series = generating_series(model, 31);
    auto t = ultimate_survival(model, 31);
    for (std::size_t u = 0; u < 31; ++u) EXPECT_NEAR(series[u], t.phi[u + 1], 1e-8) << name << " u=" << u;
  }
}

TEST(GenFun, SeriesExamples) {
  auto s1 = generating_series(fixture("example1"), 5);
  const double t1[] = {0.650, 0.790, 0.876, 0.928, 0.958};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(s1[static_cast<std::size_t>(k)], t1[k], 1e-3);
  auto s3 = generating_series(fixture("example3"), 4);
  EXPECT_NEAR(s3[0], 0.9984, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(s3[static_cast<std::size_t>(k)], 1.0, 1e-12);
}

TEST(GenFun, ValueAtZeroIsPhiOne) {
  for (const char* name : {"example1", "example2", "example3", "example4"}) {
    auto model = fixture(name);
    auto t = ultimate_survival(model, 1);
    EXPECT_NEAR(generating_function(model, 0.0).real(), t.phi[1], 1e-10) << name;
  }
}

TEST(GenFun, ExampleOneNumeratorConstant) {
  auto model = fixture("example1");
  auto sol = solve_model<double>(model);
  auto xi = make_xi<double>(model, sol.masses);
  // u(0)^T v(0) = m_0^(1) e^{-3}
  EXPECT_NEAR(xi_numerator<double>(xi, 0.0).real(), 0.6501 * std::exp(-3.0), 5e-6);
  EXPECT_NEAR(xi_numerator<double>(xi, 0.0).real(), 0.0324, 5e-5);
}

TEST(GenFun, ExampleTwoPrintedForm) {
  auto model = fixture("example2");
  for (cd s : {cd(0.0), cd(0.3), cd(-0.5, 0.2), cd(0.6, -0.1)}) {
    cd printed = (0.0516 * std::exp(s - 1.0) + 0.0484 * s) / (std::exp(1.9 * (s - 1.0)) - s * s);
    cd ours = generating_function(model, s);
    EXPECT_LT(std::abs(ours - printed), 2e-3 * std::abs(printed)) << s;
  }
}

TEST(GenFun, ExampleThreeClosedForm) {
  auto model = fixture("example3");
  for (cd s : {cd(0.0), cd(0.5), cd(-0.9), cd(0.2, 0.7)}) {
    EXPECT_NEAR(std::abs(generating_function(model, s) - (1.0 / (1.0 - s) - 0.0016)), 0.0, 1e-10) << s;
  }
}

TEST(GenFun, ConjugateSymmetry) {
  auto model = fixture("example4");
  const cd s(0.4, 0.35);
  EXPECT_NEAR(std::abs(generating_function(model, std::conj(s)) - std::conj(generating_function(model, s))), 0.0,
              1e-12);
}

TEST(GenFun, MatchesPowerSeriesInsideDisk) {
  auto model = fixture("example1");
  auto c = generating_series(model, 200);
  const cd s(0.3, -0.2);
  cd acc(0), pw(1);
  for (double v : c) {
    acc += v * pw;
    pw *= s;
  }
  EXPECT_NEAR(std::abs(generating_function(model, s) - acc), 0.0, 1e-12);
}

TEST(GenFun, RejectsPolesAndOutsideDisk) {
  auto model = fixture("example1");
  auto sol = solve_model<double>(model);
  auto xi = make_xi<double>(model, sol.masses);
  EXPECT_THROW(xi_eval<double>(xi, 1.0), DomainError);
  EXPECT_THROW(xi_eval<double>(xi, cd(0.0, 1.2)), DomainError);
  EXPECT_THROW(xi_eval<double>(xi, sol.roots.roots[0].value), PoleProximity);
  EXPECT_THROW(generating_series(fixture("supercritical"), 3), NetProfitViolated);
}

TEST(GenFun, RemovableZeroHandledBySeries) {
  // example 2 carries s^2 in numerator and denominator
  auto model = fixture("example2");
  auto phi1 = ultimate_survival(model, 1).phi[1];
  EXPECT_NEAR(generating_function(model, cd(1e-8)).real(), phi1, 1e-7);
  EXPECT_NEAR(generating_function(model, cd(1e-3)).real(), phi1, 1e-3);
}
