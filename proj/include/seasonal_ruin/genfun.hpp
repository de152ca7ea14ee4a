#pragma once

// The survival generating function
//
//   Xi(s) = sum_{u>=0} phi(u+1) s^u = u(s)^T v(s) / (G_{S_N}(s) - s^(kappa N)),  |s| < 1,
//
// with u_k(s) = s^(kappa(N-k)) G_{X_1+...+X_{k-1}}(s) and
// v_k(s) = sum_i m_i^(k+1) sum_{l=i}^{kappa-1} s^l F_{X_k}(l-i) (block N+1 read as 1).
//
// When S_N has minimal support delta > 0 both sides carry the factor s^delta;
// it is removed in the series and handled by the series near s = 0.

#include "seasonal_ruin/survival.hpp"

#include <complex>
#include <vector>

namespace seasonal_ruin {

/// Below this modulus Xi is summed from its Taylor series when delta > 0.
inline constexpr double xi_series_radius = 1e-6;

template <class Real = double>
struct XiFunction {
  RiskModel model;
  BoundaryMasses<Real> masses;
  long delta = 0;
  /// Leading Taylor coefficients, used near the removable singularity at 0.
  std::vector<Real> head;
};

namespace detail {

/// Taylor coefficients about 0 of numerator and denominator, `terms` each.
template <class Real>
std::pair<std::vector<Real>, std::vector<Real>> xi_parts(const RiskModel& model, const BoundaryMasses<Real>& b,
                                                         std::size_t terms) {
  const long kappa = model.kappa;
  const long n = model.periods();
  std::vector<Real> num(terms, Real(0));
  std::vector<Real> prefix(terms, Real(0));  // G_{X_1+...+X_{k-1}}
  prefix[0] = Real(1);
  for (long k = 1; k <= n; ++k) {
    // v_k as a polynomial of degree kappa-1
    const long block = k == n ? 1 : k + 1;
    auto x = pmf_prefix<Real>(model.claim(k), static_cast<std::size_t>(kappa));
    std::vector<Real> v(static_cast<std::size_t>(kappa), Real(0));
    for (long i = 0; i < kappa; ++i) {
      Real f(0);
      for (long l = i; l < kappa; ++l) {
        f += x[static_cast<std::size_t>(l - i)];
        v[static_cast<std::size_t>(l)] += b(block, i) * f;
      }
    }
    auto uv = series::multiply(prefix, v, terms);
    const auto shift = static_cast<std::size_t>(kappa * (n - k));
    for (std::size_t t = 0; t + shift < terms; ++t) num[t + shift] += uv[t];
    prefix = series::multiply(prefix, pmf_prefix<Real>(model.claim(k), terms), terms);
  }
  std::vector<Real> den = prefix;  // G_{S_N}
  const auto total = static_cast<std::size_t>(model.cycle_premium());
  if (total < terms) den[total] -= Real(1);
  return {num, den};
}

}  // namespace detail

/// Taylor coefficients phi(1), ..., phi(n_terms) of Xi at 0, by power-series
/// division after cancelling s^delta.
template <class Real>
std::vector<Real> xi_series(const RiskModel& model, const BoundaryMasses<Real>& b, std::size_t n_terms) {
  if (n_terms < 1) throw std::invalid_argument("n_terms must be at least 1");
  const auto delta = static_cast<std::size_t>(cycle_min_support(model));
  auto [num, den] = detail::xi_parts<Real>(model, b, n_terms + delta);
  std::vector<Real> n2(num.begin() + static_cast<long>(delta), num.end());
  std::vector<Real> d2(den.begin() + static_cast<long>(delta), den.end());
  if (d2[0] == Real(0)) throw ZeroDivisor("generating function denominator vanishes to higher order at 0");
  return series::divide(n2, d2, n_terms);
}

template <class Real>
XiFunction<Real> make_xi(const RiskModel& model, const BoundaryMasses<Real>& b) {
  XiFunction<Real> xi;
  xi.model = model;
  xi.masses = b;
  xi.delta = cycle_min_support(model);
  if (xi.delta > 0) xi.head = xi_series<Real>(model, b, 6);
  return xi;
}

template <class Real>
std::vector<Real> xi_series(const XiFunction<Real>& xi, std::size_t n_terms) {
  return xi_series<Real>(xi.model, xi.masses, n_terms);
}

/// u(s)^T v(s).
template <class Real>
complex_t<Real> xi_numerator(const XiFunction<Real>& xi, const complex_t<Real>& s) {
  using Complex = complex_t<Real>;
  const auto& model = xi.model;
  const long kappa = model.kappa;
  const long n = model.periods();
  Complex acc(0);
  Complex prefix(1);
  for (long k = 1; k <= n; ++k) {
    const long block = k == n ? 1 : k + 1;
    auto x = pmf_prefix<Real>(model.claim(k), static_cast<std::size_t>(kappa));
    Complex v(0);
    for (long i = 0; i < kappa; ++i) {
      Real f(0);
      Complex inner(0);
      for (long l = i; l < kappa; ++l) {
        f += x[static_cast<std::size_t>(l - i)];
        inner += ipow(s, l) * Complex(f);
      }
      v += Complex(xi.masses(block, i)) * inner;
    }
    acc += ipow(s, kappa * (n - k)) * prefix * v;
    prefix *= pgf_value<Real>(model.claim(k), s);
  }
  return acc;
}

/// Xi(s) for |s| < 1. Throws PoleProximity where G_{S_N}(s) - s^(kappa N) is
/// below 1e-12 relative to |G_{S_N}(s)| + |s|^(kappa N).
template <class Real>
complex_t<Real> xi_eval(const XiFunction<Real>& xi, const complex_t<Real>& s) {
  using Complex = complex_t<Real>;
  const double r = std::abs(to_complex_double<Real>(s));
  if (!(r < 1.0)) throw DomainError("generating function is evaluated only inside the unit disk");
  if (xi.delta > 0 && r < xi_series_radius) {
    Complex acc(0);
    for (std::size_t k = xi.head.size(); k-- > 0;) acc = acc * s + Complex(xi.head[k]);
    return acc;
  }
  Complex g = cycle_pgf<Real>(xi.model, s);
  Complex p = ipow(s, xi.model.cycle_premium());
  Complex den = g - p;
  // relative to the terms being cancelled: G_{S_N}(0) alone can be tiny
  Real scale = cabs<Real>(g) + cabs<Real>(p);
  if (to_double(Real(cabs<Real>(den) / scale)) <= 1e-12) {
    throw PoleProximity("s is within 1e-12 (relative) of a characteristic root");
  }
  return xi_numerator<Real>(xi, s) / den;
}

// ---------------------------------------------------------------------------
// Double-precision front ends with automatic working precision.

/// phi(1), ..., phi(n_terms) read off the generating function.
inline std::vector<double> generating_series(const RiskModel& model, long n_terms, const SurvivalOptions& opt = {}) {
  if (n_terms < 1) throw std::invalid_argument("n_terms must be at least 1");
  if (classify_regime(model) != Regime::NetProfit) {
    throw NetProfitViolated("the generating function representation requires the net profit condition");
  }
  int digits = opt.precision > 0 ? opt.precision : required_digits(model, n_terms, opt);
  return with_precision(digits, [&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto sol = solve_model<Real>(model, opt);
    auto c = xi_series<Real>(model, sol.masses, static_cast<std::size_t>(n_terms));
    std::vector<double> out;
    for (const auto& v : c) out.push_back(to_double(v));
    return out;
  });
}

inline std::complex<double> generating_function(const RiskModel& model, std::complex<double> s,
                                                const SurvivalOptions& opt = {}) {
  if (classify_regime(model) != Regime::NetProfit) {
    throw NetProfitViolated("the generating function representation requires the net profit condition");
  }
  int digits = opt.precision > 0 ? opt.precision : 50;
  return with_precision(digits, [&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto sol = solve_model<Real>(model, opt);
    auto xi = make_xi<Real>(model, sol.masses);
    return to_complex_double<Real>(xi_eval<Real>(xi, from_complex_double<Real>(s)));
  });
}

}  // namespace seasonal_ruin
