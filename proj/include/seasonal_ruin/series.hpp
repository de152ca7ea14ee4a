#pragma once

// Truncated power series helpers. A series is a vector of coefficients
// c_0, c_1, ... in powers of (s - s0); Taylor coefficients are stored divided
// by k!, so the k-th derivative at s0 is k! * c_k.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace seasonal_ruin::series {

template <class T>
std::vector<T> multiply(const std::vector<T>& a, const std::vector<T>& b, std::size_t terms) {
  std::vector<T> out(terms, T(0));
  for (std::size_t i = 0; i < std::min(a.size(), terms); ++i) {
    if (a[i] == T(0)) continue;
    for (std::size_t j = 0; j < b.size() && i + j < terms; ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

/// Quotient num / den to `terms` coefficients. den[0] must be nonzero.
template <class T>
std::vector<T> divide(const std::vector<T>& num, const std::vector<T>& den, std::size_t terms) {
  std::vector<T> q(terms, T(0));
  for (std::size_t n = 0; n < terms; ++n) {
    T acc = n < num.size() ? num[n] : T(0);
    for (std::size_t k = 1; k <= n && k < den.size(); ++k) acc -= den[k] * q[n - k];
    q[n] = acc / den[0];
  }
  return q;
}

/// Taylor coefficients of s^e about s0 (s0 != 0 when e < 0):
/// c_k = binom(e, k) * s0^(e-k), with the generalized binomial.
template <class Complex>
std::vector<Complex> power_taylor(const Complex& s0, long e, std::size_t terms) {
  std::vector<Complex> out(terms, Complex(0));
  if (terms == 0) return out;
  if (e >= 0 && s0 == Complex(0)) {
    if (static_cast<std::size_t>(e) < terms) out[static_cast<std::size_t>(e)] = Complex(1);
    return out;
  }
  Complex inv = Complex(1) / s0;
  // s0^e
  Complex base(1);
  {
    Complex z = e < 0 ? inv : s0;
    long n = e < 0 ? -e : e;
    while (n > 0) {
      if (n & 1) base *= z;
      z *= z;
      n >>= 1;
    }
  }
  out[0] = base;
  for (std::size_t k = 1; k < terms; ++k) {
    // binom(e,k)/binom(e,k-1) = (e-k+1)/k
    long num = e - static_cast<long>(k) + 1;
    out[k] = out[k - 1] * inv * Complex(static_cast<double>(num)) / Complex(static_cast<double>(k));
    if (e >= 0 && num == 0) {
      for (std::size_t j = k; j < terms; ++j) out[j] = Complex(0);
      break;
    }
  }
  return out;
}

}  // namespace seasonal_ruin::series
