#pragma once

// Non-negative integer-valued claim distributions: finite probability tables
// and displaced Poisson laws P(lambda, shift).

#include "seasonal_ruin/numeric.hpp"
#include "seasonal_ruin/series.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seasonal_ruin {

enum class DistKind { FiniteTable, DisplacedPoisson };

/// Probability tolerance applied when validating user-supplied tables.
inline constexpr double normalization_tol = 1e-12;

/// Tail bound used whenever a Poisson law has to be materialized as a table.
inline constexpr double materialize_tail = 1e-15;

struct TruncatedDist {
  std::vector<double> probs;
  double tail_mass = 0.0;
};

class DiscreteDist {
 public:
  /// probs[i] = P(X = i). Rejects negative or non-finite entries and tables
  /// whose total differs from one by more than normalization_tol.
  static DiscreteDist table(std::vector<double> probs) {
    if (probs.empty()) throw ValidationError("probability table is empty");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!std::isfinite(probs[i])) {
        throw ValidationError("probs[" + std::to_string(i) + "] is not finite");
      }
      if (probs[i] < 0.0) {
        throw ValidationError("probs[" + std::to_string(i) + "] is negative");
      }
      total += probs[i];
    }
    if (std::abs(total - 1.0) > normalization_tol) {
      throw ValidationError("probabilities sum to " + std::to_string(total) + ", expected 1");
    }
    DiscreteDist d;
    d.kind_ = DistKind::FiniteTable;
    d.probs_ = std::move(probs);
    return d;
  }

  static DiscreteDist poisson(double lambda, long shift = 0) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
      throw ValidationError("poisson lambda must be positive");
    }
    if (shift < 0) throw ValidationError("poisson shift must be non-negative");
    DiscreteDist d;
    d.kind_ = DistKind::DisplacedPoisson;
    d.lambda_ = lambda;
    d.shift_ = shift;
    return d;
  }

  /// Point mass at `value`.
  static DiscreteDist constant(long value) {
    if (value < 0) throw ValidationError("point mass must be non-negative");
    std::vector<double> p(static_cast<std::size_t>(value) + 1, 0.0);
    p.back() = 1.0;
    return table(std::move(p));
  }

  DistKind kind() const noexcept { return kind_; }
  bool is_table() const noexcept { return kind_ == DistKind::FiniteTable; }
  bool is_poisson() const noexcept { return kind_ == DistKind::DisplacedPoisson; }

  const std::vector<double>& probs() const noexcept { return probs_; }
  double lambda() const noexcept { return lambda_; }
  long shift() const noexcept { return shift_; }

  /// Smallest i with P(X = i) > 0.
  long min_support() const {
    if (is_poisson()) return shift_;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (probs_[i] > 0.0) return static_cast<long>(i);
    }
    return 0;
  }

  /// Largest i with P(X = i) > 0, or nullopt for unbounded support.
  std::optional<long> max_support() const {
    if (is_poisson()) return std::nullopt;
    for (std::size_t i = probs_.size(); i-- > 0;) {
      if (probs_[i] > 0.0) return static_cast<long>(i);
    }
    return 0;
  }

  /// The atom of a degenerate law, if it is one.
  std::optional<long> point_mass() const {
    if (is_poisson()) return std::nullopt;
    auto lo = min_support();
    auto hi = *max_support();
    if (lo == hi) return lo;
    return std::nullopt;
  }

  bool operator==(const DiscreteDist& other) const {
    if (kind_ != other.kind_) return false;
    if (is_poisson()) return lambda_ == other.lambda_ && shift_ == other.shift_;
    return probs_ == other.probs_;
  }

 private:
  DiscreteDist() = default;

  DistKind kind_ = DistKind::FiniteTable;
  std::vector<double> probs_;
  double lambda_ = 0.0;
  long shift_ = 0;
};

// ---------------------------------------------------------------------------
// Exact probabilities in an arbitrary working precision.

namespace detail {

template <class Real>
std::vector<Real> normalized_table(const DiscreteDist& d) {
  std::vector<Real> p;
  p.reserve(d.probs().size());
  Real total(0);
  for (double v : d.probs()) {
    p.push_back(from_double<Real>(v));
    total += p.back();
  }
  for (auto& v : p) v /= total;
  return p;
}

inline double poisson_pmf_double(double lambda, long k) {
  if (k < 0) return 0.0;
  if (lambda < 700.0 && k < 2000) {
    double p = std::exp(-lambda);
    for (long j = 1; j <= k; ++j) p *= lambda / static_cast<double>(j);
    return p;
  }
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace detail

/// First `n` values P(X = 0), ..., P(X = n-1) in precision Real. Tables are
/// renormalized exactly in Real so that their generating function is one at
/// s = 1 to working precision.
template <class Real>
std::vector<Real> pmf_prefix(const DiscreteDist& d, std::size_t n) {
  std::vector<Real> out(n, Real(0));
  if (d.is_table()) {
    auto p = detail::normalized_table<Real>(d);
    for (std::size_t i = 0; i < std::min(n, p.size()); ++i) out[i] = p[i];
    return out;
  }
  const auto shift = static_cast<std::size_t>(d.shift());
  if (shift >= n) return out;
  if constexpr (std::is_same_v<Real, double>) {
    for (std::size_t i = shift; i < n; ++i) {
      out[i] = detail::poisson_pmf_double(d.lambda(), static_cast<long>(i - shift));
    }
  } else {
    using std::exp;
    Real lambda = from_double<Real>(d.lambda());
    Real p = exp(-lambda);
    out[shift] = p;
    for (std::size_t i = shift + 1; i < n; ++i) {
      p *= lambda / Real(static_cast<long>(i - shift));
      out[i] = p;
    }
  }
  return out;
}

template <class Real>
Real pmf_as(const DiscreteDist& d, long i) {
  if (i < 0) return Real(0);
  if (d.is_table()) {
    if (static_cast<std::size_t>(i) >= d.probs().size()) return Real(0);
    return detail::normalized_table<Real>(d)[static_cast<std::size_t>(i)];
  }
  return pmf_prefix<Real>(d, static_cast<std::size_t>(i) + 1).back();
}

/// P(X = i); zero outside the support.
inline double pmf(const DiscreteDist& d, long i) {
  if (i < 0) return 0.0;
  if (d.is_table()) {
    return static_cast<std::size_t>(i) < d.probs().size() ? d.probs()[static_cast<std::size_t>(i)]
                                                          : 0.0;
  }
  return detail::poisson_pmf_double(d.lambda(), i - d.shift());
}

/// P(X <= k); zero for k < 0.
inline double cdf(const DiscreteDist& d, long k) {
  if (k < 0) return 0.0;
  if (d.is_table()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.probs().size() && static_cast<long>(i) <= k; ++i) {
      acc += d.probs()[i];
    }
    return acc;
  }
  double acc = 0.0;
  for (long i = d.shift(); i <= k; ++i) acc += pmf(d, i);
  return std::min(acc, 1.0);
}

inline double mean(const DiscreteDist& d) {
  if (d.is_poisson()) return d.lambda() + static_cast<double>(d.shift());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.probs().size(); ++i) acc += static_cast<double>(i) * d.probs()[i];
  return acc;
}

template <class Real>
Real mean_as(const DiscreteDist& d) {
  if (d.is_poisson()) return from_double<Real>(d.lambda()) + Real(d.shift());
  auto p = detail::normalized_table<Real>(d);
  Real acc(0);
  for (std::size_t i = 0; i < p.size(); ++i) acc += Real(static_cast<long>(i)) * p[i];
  return acc;
}

/// G_X(s) in precision Real without the unit-disk check (the exponential is
/// entire; refinement iterates may step just outside the disk).
template <class Real>
complex_t<Real> pgf_value(const DiscreteDist& d, const complex_t<Real>& s) {
  using Complex = complex_t<Real>;
  if (d.is_table()) {
    auto p = detail::normalized_table<Real>(d);
    Complex acc(0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * s + Complex(p[i]);
    return acc;
  }
  Real lambda = from_double<Real>(d.lambda());
  return ipow(s, d.shift()) * cexp<Real>(Complex(lambda) * (s - Complex(1)));
}

/// Taylor coefficients G^(k)(s0)/k!, k = 0..terms-1.
template <class Real>
std::vector<complex_t<Real>> pgf_taylor(const DiscreteDist& d, const complex_t<Real>& s0,
                                        std::size_t terms) {
  using Complex = complex_t<Real>;
  if (d.is_table()) {
    auto p = detail::normalized_table<Real>(d);
    std::vector<Complex> a(p.begin(), p.end());
    std::vector<Complex> out(terms, Complex(0));
    const std::size_t degree = a.size() - 1;
    for (std::size_t k = 0; k < terms && k <= degree; ++k) {
      for (std::size_t j = degree; j-- > k;) a[j] += s0 * a[j + 1];
      out[k] = a[k];
    }
    return out;
  }
  Real lambda = from_double<Real>(d.lambda());
  std::vector<Complex> ex(terms);
  Complex e = cexp<Real>(Complex(lambda) * (s0 - Complex(1)));
  for (std::size_t k = 0; k < terms; ++k) {
    ex[k] = e;
    e *= Complex(lambda) / Complex(Real(static_cast<long>(k + 1)));
  }
  if (d.shift() == 0) return ex;
  return series::multiply(series::power_taylor(s0, d.shift(), terms), ex, terms);
}

/// G_X(s). Displaced Poisson arguments must lie in |s| <= 1 + 1e-9.
inline std::complex<double> pgf(const DiscreteDist& d, std::complex<double> s) {
  if (d.is_poisson() && std::abs(s) > 1.0 + 1e-9) {
    throw DomainError("poisson generating function evaluated outside the closed unit disk");
  }
  return pgf_value<double>(d, s);
}

/// n-th derivative of G_X at s (n >= 1), same domain rule as pgf.
inline std::complex<double> pgf_derivative(const DiscreteDist& d, std::complex<double> s, int n) {
  if (n < 1) throw std::invalid_argument("derivative order must be positive");
  if (d.is_poisson() && std::abs(s) > 1.0 + 1e-9) {
    throw DomainError("poisson generating function evaluated outside the closed unit disk");
  }
  auto c = pgf_taylor<double>(d, s, static_cast<std::size_t>(n) + 1);
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return c[static_cast<std::size_t>(n)] * fact;
}

/// Smallest prefix whose neglected tail is at most eps. Tables are returned
/// unchanged with zero tail.
inline TruncatedDist truncate(const DiscreteDist& d, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("truncation eps must lie in (0,1)");
  if (d.is_table()) return {d.probs(), 0.0};
  const double lambda = d.lambda();
  const auto limit = static_cast<std::size_t>(d.shift() + lambda + 40.0 * std::sqrt(lambda) + 60.0);
  std::vector<double> p(limit + 1);
  for (std::size_t i = 0; i <= limit; ++i) p[i] = pmf(d, static_cast<long>(i));
  // suffix[i] = P(X >= i), summed from the far tail for accuracy
  std::vector<double> suffix(limit + 2, 0.0);
  for (std::size_t i = limit + 1; i-- > 0;) suffix[i] = suffix[i + 1] + p[i];
  for (std::size_t k = 0; k <= limit; ++k) {
    if (suffix[k + 1] <= eps) {
      return {std::vector<double>(p.begin(), p.begin() + static_cast<long>(k) + 1), suffix[k + 1]};
    }
  }
  return {p, suffix[limit + 1]};
}

/// Law of X + Y for independent X, Y.
inline DiscreteDist convolve(const DiscreteDist& a, const DiscreteDist& b) {
  if (a.is_poisson() && b.is_poisson()) {
    return DiscreteDist::poisson(a.lambda() + b.lambda(), a.shift() + b.shift());
  }
  if (auto c = a.point_mass(); c && b.is_poisson()) {
    return DiscreteDist::poisson(b.lambda(), b.shift() + *c);
  }
  if (auto c = b.point_mass(); c && a.is_poisson()) {
    return DiscreteDist::poisson(a.lambda(), a.shift() + *c);
  }
  auto ta = truncate(a, materialize_tail).probs;
  auto tb = truncate(b, materialize_tail).probs;
  std::vector<double> out(ta.size() + tb.size() - 1, 0.0);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::size_t j = 0; j < tb.size(); ++j) out[i + j] += ta[i] * tb[j];
  }
  return DiscreteDist::table(std::move(out));
}

}  // namespace seasonal_ruin
