#pragma once

// Scalar plumbing shared by every module: real/complex type pairs for each
// working precision, exact decimal conversion of user inputs, and the error
// hierarchy.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace seasonal_ruin {

namespace mp = boost::multiprecision;

using real50 = mp::number<mp::cpp_bin_float<50>, mp::et_off>;
using real100 = mp::number<mp::cpp_bin_float<100>, mp::et_off>;
using real200 = mp::number<mp::cpp_bin_float<200>, mp::et_off>;

template <class Real>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  using complex = std::complex<double>;
  static constexpr int digits10 = 15;
};

template <unsigned Digits>
struct scalar_traits<mp::number<mp::cpp_bin_float<Digits>, mp::et_off>> {
  using complex = mp::number<mp::complex_adaptor<mp::cpp_bin_float<Digits>>, mp::et_off>;
  static constexpr int digits10 = static_cast<int>(Digits);
};

template <class Real>
using complex_t = typename scalar_traits<Real>::complex;

/// Largest working precision the adaptive ladder will select.
inline constexpr int max_ladder_digits = 200;

// ---------------------------------------------------------------------------
// Errors

class RuinError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public RuinError {
 public:
  using RuinError::RuinError;
};

class ValidationError : public RuinError {
 public:
  using RuinError::RuinError;
};

class ParseError : public RuinError {
 public:
  using RuinError::RuinError;
};

class NetProfitViolated : public RuinError {
 public:
  using RuinError::RuinError;
};

class RootCountMismatch : public RuinError {
 public:
  using RuinError::RuinError;
};

class SingularSystem : public RuinError {
 public:
  SingularSystem(const std::string& what, double condition, double log10_abs_det)
      : RuinError(what), condition_(condition), log10_abs_det_(log10_abs_det) {}
  double condition() const noexcept { return condition_; }
  double log10_abs_det() const noexcept { return log10_abs_det_; }

 private:
  double condition_;
  double log10_abs_det_;
};

class DimensionMismatch : public RuinError {
 public:
  using RuinError::RuinError;
};

class ImaginaryResidue : public RuinError {
 public:
  using RuinError::RuinError;
};

class PoleProximity : public RuinError {
 public:
  using RuinError::RuinError;
};

class ZeroDivisor : public RuinError {
 public:
  using RuinError::RuinError;
};

class NegativeMass : public RuinError {
 public:
  using RuinError::RuinError;
};

// ---------------------------------------------------------------------------
// Conversions

/// Converts a double to Real through its shortest round-trip decimal form, so
/// that 0.4096 becomes the extended-precision value closest to 4096/10000 and
/// not the binary neighbour of the double.
template <class Real>
Real from_double(double x) {
  if constexpr (std::is_same_v<Real, double>) {
    return x;
  } else {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return Real(std::string(buf, res.ptr));
  }
}

template <class Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

template <class Real>
std::complex<double> to_complex_double(const complex_t<Real>& z) {
  using std::imag;
  using std::real;
  return {static_cast<double>(real(z)), static_cast<double>(imag(z))};
}

template <class Real>
complex_t<Real> from_complex_double(std::complex<double> z) {
  return complex_t<Real>(from_double<Real>(z.real()), from_double<Real>(z.imag()));
}

template <class Real>
Real re(const complex_t<Real>& z) {
  using std::real;
  return real(z);
}

template <class Real>
Real im(const complex_t<Real>& z) {
  using std::imag;
  return imag(z);
}

template <class Real>
Real cabs(const complex_t<Real>& z) {
  using std::abs;
  return abs(z);
}

template <class Real>
complex_t<Real> cexp(const complex_t<Real>& z) {
  using std::exp;
  return exp(z);
}

template <class Real>
complex_t<Real> cconj(const complex_t<Real>& z) {
  using std::conj;
  return conj(z);
}

/// z^n for integer n (negative allowed, z != 0), by repeated squaring.
template <class Complex>
Complex ipow(Complex z, long n) {
  Complex result(1);
  if (n < 0) {
    z = Complex(1) / z;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

template <class Real>
Real machine_epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

// ---------------------------------------------------------------------------
// Precision ladder

template <class Real>
struct precision_tag {
  using type = Real;
};

/// Smallest ladder precision with at least `digits` decimal digits; the top of
/// the ladder is returned when the request exceeds it.
inline int ladder_digits(int digits) {
  if (digits <= 15) return 15;
  if (digits <= 50) return 50;
  if (digits <= 100) return 100;
  return max_ladder_digits;
}

/// Invokes `fn(precision_tag<Real>{})` with the ladder type selected for
/// `digits`.
template <class Fn>
decltype(auto) with_precision(int digits, Fn&& fn) {
  switch (ladder_digits(digits)) {
    case 15:
      return fn(precision_tag<double>{});
    case 50:
      return fn(precision_tag<real50>{});
    case 100:
      return fn(precision_tag<real100>{});
    default:
      return fn(precision_tag<real200>{});
  }
}

}  // namespace seasonal_ruin
