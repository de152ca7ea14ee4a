#include "seasonal_ruin/distributions.hpp"
#include "seasonal_ruin/boundary.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace seasonal_ruin;
using cd = std::complex<double>;

namespace {

const DiscreteDist table3 = DiscreteDist::table({0.4096, 0.4096, 0.1536, 0.0256, 0.0016});
const DiscreteDist table4 = DiscreteDist::table({0.04, 0.32, 0.64});

// direct evaluation of the polynomial, independent of the library
cd poly_eval(const std::vector<double>& p, cd s) {
  cd acc(0), pw(1);
  for (double c : p) {
    acc += c * pw;
    pw *= s;
  }
  return acc;
}

}  // namespace

TEST(Distributions, PmfExamples) {
  EXPECT_NEAR(pmf(DiscreteDist::poisson(2.0, 0), 0), std::exp(-2.0), 1e-15);
  EXPECT_DOUBLE_EQ(pmf(table4, 2), 0.64);
  EXPECT_EQ(pmf(DiscreteDist::poisson(1.0, 1), 0), 0.0);
  EXPECT_EQ(pmf(table4, 7), 0.0);
  EXPECT_EQ(pmf(table4, -1), 0.0);
}

TEST(Distributions, CdfExamples) {
  EXPECT_NEAR(cdf(table3, 1), 0.8192, 1e-15);
  EXPECT_EQ(cdf(table3, -1), 0.0);
  EXPECT_EQ(cdf(DiscreteDist::poisson(2.0), -1), 0.0);
  EXPECT_NEAR(cdf(DiscreteDist::poisson(2.0, 0), 1), 3.0 * std::exp(-2.0), 1e-15);
}

TEST(Distributions, MeanExamples) {
  EXPECT_NEAR(mean(DiscreteDist::poisson(0.9, 1)), 1.9, 1e-15);
  EXPECT_EQ(mean(DiscreteDist::table({1.0})), 0.0);
  EXPECT_NEAR(mean(table3), 0.8, 1e-15);
}

TEST(Distributions, PgfExamples) {
  EXPECT_NEAR(std::abs(pgf(DiscreteDist::poisson(3.0), 1.0) - 1.0), 0.0, 1e-15);
  const cd s(0.3, -0.4);
  EXPECT_NEAR(std::abs(pgf(DiscreteDist::poisson(1.9, 2), s) - s * s * std::exp(1.9 * (s - 1.0))), 0.0, 1e-15);
  EXPECT_NEAR(pgf(DiscreteDist::table({0.3, 0.1, 0, 0, 0, 0.6}), -1.0).real(), -0.4, 1e-15);
}

TEST(Distributions, PgfDomain) {
  EXPECT_THROW(pgf(DiscreteDist::poisson(1.0), 1.1), DomainError);
  EXPECT_NO_THROW(pgf(DiscreteDist::poisson(1.0), cd(1.0 + 1e-10)));
  EXPECT_NO_THROW(pgf(table4, 3.0));
}

TEST(Distributions, PgfDerivative) {
  for (const auto& d : {table3, table4, DiscreteDist::poisson(1.5, 2), DiscreteDist::constant(3)}) {
    EXPECT_NEAR(pgf_derivative(d, 1.0, 1).real(), mean(d), 1e-10);
  }
  const cd s(0.2, 0.5);
  EXPECT_NEAR(std::abs(pgf_derivative(DiscreteDist::poisson(2.5), s, 1) - 2.5 * std::exp(2.5 * (s - 1.0))), 0.0,
              1e-14);
  const double a = -4.0 / 11.0, h = 1e-5;
  const double fd = (poly_eval(table4.probs(), a + h) - poly_eval(table4.probs(), a - h)).real() / (2 * h);
  EXPECT_NEAR(pgf_derivative(table4, a, 1).real(), fd, 1e-8);
  // second derivative of a Poisson PGF is lambda^2 G
  EXPECT_NEAR(std::abs(pgf_derivative(DiscreteDist::poisson(2.0), s, 2) - 4.0 * std::exp(2.0 * (s - 1.0))), 0.0,
              1e-13);
}

TEST(Distributions, Convolve) {
  auto c = convolve(DiscreteDist::poisson(1.0), DiscreteDist::poisson(2.0));
  ASSERT_TRUE(c.is_poisson());
  EXPECT_DOUBLE_EQ(c.lambda(), 3.0);
  EXPECT_EQ(c.shift(), 0);

  auto id = convolve(DiscreteDist::table({1.0}), table4);
  ASSERT_EQ(id.probs().size(), table4.probs().size());
  for (std::size_t i = 0; i < id.probs().size(); ++i) EXPECT_DOUBLE_EQ(id.probs()[i], table4.probs()[i]);

  auto prod = convolve(table3, table4);
  EXPECT_NEAR(std::abs(pgf(prod, 0.5) - pgf(table3, 0.5) * pgf(table4, 0.5)), 0.0, 1e-12);
}

TEST(Distributions, ConvolveMixedMatchesPgfProduct) {
  auto p = DiscreteDist::poisson(1.2, 1);
  auto c = convolve(p, table4);
  const cd s(-0.3, 0.6);
  EXPECT_NEAR(std::abs(pgf(c, s) - pgf(p, s) * pgf(table4, s)), 0.0, 1e-13);
}

TEST(Distributions, Truncate) {
  auto t = truncate(table4, 1e-12);
  EXPECT_EQ(t.tail_mass, 0.0);
  EXPECT_EQ(t.probs, table4.probs());

  // cumulative-sum oracle for the Poisson(3) tail
  auto p3 = truncate(DiscreteDist::poisson(3.0), 1e-14);
  double term = std::exp(-3.0), head = 0.0;
  std::size_t need = 0;
  for (std::size_t k = 0;; ++k) {
    head += term;
    if (1.0 - head <= 1e-14 * 0.5 && k > 0) {
      need = k + 1;
      break;
    }
    term *= 3.0 / static_cast<double>(k + 1);
  }
  EXPECT_LE(p3.tail_mass, 1e-14);
  EXPECT_LE(p3.probs.size(), need);
  EXPECT_GE(p3.probs.size(), need - 2);

  // smallest prefix of P(1,1) with tail <= 0.5 is {0, 1, 2}
  auto p11 = truncate(DiscreteDist::poisson(1.0, 1), 0.5);
  ASSERT_EQ(p11.probs.size(), 3u);
  EXPECT_EQ(p11.probs[0], 0.0);
  EXPECT_NEAR(p11.probs[1], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(p11.tail_mass, 1.0 - 2.0 * std::exp(-1.0), 1e-15);
}

TEST(Distributions, Validation) {
  EXPECT_THROW(DiscreteDist::table({0.5, 0.6}), ValidationError);
  EXPECT_THROW(DiscreteDist::table({1.1, -0.1}), ValidationError);
  EXPECT_THROW(DiscreteDist::table({}), ValidationError);
  EXPECT_THROW(DiscreteDist::poisson(-1.0), ValidationError);
  EXPECT_THROW(DiscreteDist::poisson(1.0, -1), ValidationError);
}

TEST(Distributions, RandomTableProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_table(rng, 6);
    auto b = random_table(rng, 6);
    auto c = random_table(rng, 4);
    EXPECT_NEAR(std::abs(pgf(a, 1.0) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(pgf_derivative(a, 1.0, 1).real(), mean(a), 1e-10);

    const cd s(u(rng), u(rng));
    EXPECT_NEAR(std::abs(pgf(convolve(a, b), s) - pgf(a, s) * pgf(b, s)), 0.0, 1e-12);

    auto ab = convolve(a, b).probs(), ba = convolve(b, a).probs();
    auto abc = convolve(convolve(a, b), c).probs(), a_bc = convolve(a, convolve(b, c)).probs();
    ASSERT_EQ(ab.size(), ba.size());
    ASSERT_EQ(abc.size(), a_bc.size());
    for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_NEAR(ab[i], ba[i], 1e-12);
    for (std::size_t i = 0; i < abc.size(); ++i) EXPECT_NEAR(abc[i], a_bc[i], 1e-12);

    double prev = 0.0;
    for (long k = 0; k < 8; ++k) {
      EXPECT_GE(cdf(a, k), prev);
      prev = cdf(a, k);
    }
    EXPECT_NEAR(prev, 1.0, 1e-12);
  }
}
