#pragma once

// Dense complex linear algebra in any working precision. Matrices are stored
// row-major in a flat vector.

#include "seasonal_ruin/numeric.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace seasonal_ruin {

template <class Real>
struct LuFactors {
  std::size_t n = 0;
  std::vector<complex_t<Real>> a;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;

  /// log10 |det|, -inf when singular.
  double log10_abs_det() const {
    if (singular) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      using std::log10;
      acc += to_double(log10(cabs<Real>(a[i * n + i])));
    }
    return acc;
  }

  complex_t<Real> det() const {
    complex_t<Real> d(sign);
    for (std::size_t i = 0; i < n; ++i) d *= a[i * n + i];
    return d;
  }

  std::vector<complex_t<Real>> solve(std::vector<complex_t<Real>> b) const {
    std::vector<complex_t<Real>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= a[i * n + k] * x[k];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) x[i] -= a[i * n + k] * x[k];
      x[i] /= a[i * n + i];
    }
    return x;
  }
};

/// LU factorization with partial pivoting.
template <class Real>
LuFactors<Real> lu_factor(std::vector<complex_t<Real>> a, std::size_t n) {
  LuFactors<Real> f;
  f.n = n;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    Real best = cabs<Real>(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Real v = cabs<Real>(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == Real(0)) {
      f.singular = true;
      continue;
    }
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(f.perm[col], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      complex_t<Real> factor = a[r * n + col] / a[col * n + col];
      a[r * n + col] = factor;
      if (factor == complex_t<Real>(0)) continue;
      for (std::size_t k = col + 1; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
    }
  }
  f.a = std::move(a);
  return f;
}

/// 2-norm condition number of the row-equilibrated matrix (each row scaled to
/// unit max-norm), computed in double.
template <class Real>
double condition_number(const std::vector<complex_t<Real>>& a, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd m(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(to_complex_double<Real>(a[i * n + k])));
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = to_complex_double<Real>(a[i * n + k]) / scale;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  double smin = sv(dim - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace seasonal_ruin
