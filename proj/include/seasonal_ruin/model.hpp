#pragma once

// The N-seasonal discrete-time risk model W(n) = u + kappa*n - (X_1 + ... + X_n)
// with X_{i+N} distributed as X_i.

#include "seasonal_ruin/distributions.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace seasonal_ruin {

struct RiskModel {
  long kappa = 1;
  std::vector<DiscreteDist> seasons;
  std::string name;
  std::string description;

  RiskModel() = default;
  RiskModel(long kappa_, std::vector<DiscreteDist> seasons_) : kappa(kappa_), seasons(std::move(seasons_)) {
    validate();
  }

  void validate() const {
    if (kappa < 1) throw ValidationError("kappa must be a positive integer");
    if (seasons.empty()) throw ValidationError("at least one season is required");
  }

  long periods() const noexcept { return static_cast<long>(seasons.size()); }
  long cycle_premium() const noexcept { return kappa * periods(); }

  /// X_k for k = 1..N, with X_0 = X_N and indices taken cyclically.
  const DiscreteDist& claim(long k) const {
    long n = periods();
    long idx = ((k - 1) % n + n) % n;
    return seasons[static_cast<std::size_t>(idx)];
  }

  /// The claim law paired with block j (1-based) of the boundary unknowns: the
  /// masses of M_j are tied to X_{j-1}.
  const DiscreteDist& block_claim(long j) const { return claim(j - 1); }

  bool operator==(const RiskModel& other) const {
    return kappa == other.kappa && seasons == other.seasons && name == other.name &&
           description == other.description;
  }
};

inline double expected_cycle_claims(const RiskModel& model) {
  double acc = 0.0;
  for (const auto& d : model.seasons) acc += mean(d);
  return acc;
}

template <class Real>
Real expected_cycle_claims_as(const RiskModel& model) {
  Real acc(0);
  for (const auto& d : model.seasons) acc += mean_as<Real>(d);
  return acc;
}

/// kappa*N - E S_N; positive exactly when the net profit condition holds.
inline double net_profit_margin(const RiskModel& model) {
  return static_cast<double>(model.cycle_premium()) - expected_cycle_claims(model);
}

/// Minimal support of S_N = X_1 + ... + X_N.
inline long cycle_min_support(const RiskModel& model) {
  long acc = 0;
  for (const auto& d : model.seasons) acc += d.min_support();
  return acc;
}

/// G_{S_N}(s) as the product of the seasons' exact generating functions.
template <class Real>
complex_t<Real> cycle_pgf(const RiskModel& model, const complex_t<Real>& s) {
  complex_t<Real> acc(1);
  for (const auto& d : model.seasons) acc *= pgf_value<Real>(d, s);
  return acc;
}

/// Taylor coefficients of G_{S_N} about s0.
template <class Real>
std::vector<complex_t<Real>> cycle_pgf_taylor(const RiskModel& model, const complex_t<Real>& s0,
                                              std::size_t terms) {
  std::vector<complex_t<Real>> acc(terms, complex_t<Real>(0));
  if (terms == 0) return acc;
  acc[0] = complex_t<Real>(1);
  for (const auto& d : model.seasons) acc = series::multiply(acc, pgf_taylor<Real>(d, s0, terms), terms);
  return acc;
}

/// Distribution of S_N as a table (Poisson factors truncated at tail 1e-15).
inline DiscreteDist cycle_distribution(const RiskModel& model) {
  DiscreteDist acc = DiscreteDist::constant(0);
  for (const auto& d : model.seasons) acc = convolve(acc, d);
  return acc;
}

}  // namespace seasonal_ruin
