#pragma once

// Roots of s^(kappa*N) = G_{S_N}(s) in the closed unit disk, s != 1.
//
// Isolation runs in double precision: a globally convergent branch iteration
// when every season is displaced Poisson, otherwise the companion matrix of a
// truncated polynomial surrogate. Candidates are then polished by Newton's
// method on the exact function h(s) = G_{S_N}(s) - s^(kappa*N) (on h^(r-1) for a
// root of multiplicity r) and, for extended Real types, refined again in the
// working precision.

#include "seasonal_ruin/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

namespace seasonal_ruin {

struct RootConfig {
  double truncation_eps = 1e-14;
  double disk_band = 1e-6;
  double exclusion_tol = 1e-8;
  double cluster_tol = 1e-6;
  int max_newton = 100;
  double derivative_tol = 1e-5;
};

template <class Real = double>
struct Root {
  complex_t<Real> value{};
  int multiplicity = 1;
  /// |G_{S_N}(value) - value^(kappa*N)|
  double residual = 0.0;
  /// s = 0, present when S_N has positive minimal support.
  bool at_zero = false;
  /// |value| > 1: retained only because of the boundary band.
  bool in_band = false;
  /// The derivative test agrees with the cluster size.
  bool multiplicity_confirmed = true;
};

template <class Real = double>
struct RootSet {
  std::vector<Root<Real>> roots;
  int total_with_multiplicity = 0;
  bool band_used = false;
  std::string method;

  /// Nonzero roots only.
  std::vector<Root<Real>> nonzero() const {
    std::vector<Root<Real>> out;
    for (const auto& r : roots) {
      if (!r.at_zero) out.push_back(r);
    }
    return out;
  }

  double min_nonzero_modulus() const {
    double m = 1.0;
    for (const auto& r : roots) {
      if (!r.at_zero) m = std::min(m, std::abs(to_complex_double<Real>(r.value)));
    }
    return m;
  }
};

// ---------------------------------------------------------------------------

/// Taylor coefficients of h(s) = G_{S_N}(s) - s^(kappa*N) about s0.
template <class Real>
std::vector<complex_t<Real>> characteristic_taylor(const RiskModel& model, const complex_t<Real>& s0,
                                                   std::size_t terms) {
  auto g = cycle_pgf_taylor<Real>(model, s0, terms);
  auto p = series::power_taylor(s0, model.cycle_premium(), terms);
  for (std::size_t k = 0; k < terms; ++k) g[k] -= p[k];
  return g;
}

template <class Real>
complex_t<Real> characteristic_value(const RiskModel& model, const complex_t<Real>& s) {
  return cycle_pgf<Real>(model, s) - ipow(s, model.cycle_premium());
}

/// Greedy single-linkage clustering at distance `tol`; each cluster becomes a
/// root at its centroid with multiplicity equal to its size.
inline RootSet<double> cluster_multiplicities(const std::vector<std::complex<double>>& raw, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("cluster tolerance must be positive");
  const std::size_t n = raw.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(raw[i] - raw[j]) <= tol) parent[find(i)] = find(j);
    }
  }
  std::vector<std::size_t> order;
  RootSet<double> out;
  std::vector<std::complex<double>> sums;
  std::vector<int> counts;
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    auto it = std::find(reps.begin(), reps.end(), r);
    if (it == reps.end()) {
      reps.push_back(r);
      sums.push_back(raw[i]);
      counts.push_back(1);
    } else {
      auto k = static_cast<std::size_t>(it - reps.begin());
      sums[k] += raw[i];
      counts[k] += 1;
    }
  }
  for (std::size_t k = 0; k < reps.size(); ++k) {
    Root<double> root;
    root.value = sums[k] / static_cast<double>(counts[k]);
    root.multiplicity = counts[k];
    root.residual = std::numeric_limits<double>::quiet_NaN();
    out.roots.push_back(root);
    out.total_with_multiplicity += counts[k];
  }
  return out;
}

namespace detail {

/// Parlett-Reinsch balancing (radix 2) applied in place.
inline void balance(Eigen::MatrixXd& a) {
  const double radix = 2.0;
  const double sqrdx = radix * radix;
  const auto n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix;
        double f = 1.0;
        double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sqrdx;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sqrdx;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          a.row(i) *= g;
          a.col(i) *= f;
        }
      }
    }
  }
}

/// All roots of sum_i c[i] s^i via the balanced companion matrix.
inline std::vector<std::complex<double>> polynomial_roots(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const auto degree = static_cast<Eigen::Index>(c.size()) - 1;
  if (degree < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) comp(i, degree - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  balance(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < degree; ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

/// Newton on h^(r-1); returns false if the iteration left the region of
/// interest or produced non-finite values.
template <class Real>
bool newton_polish(const RiskModel& model, complex_t<Real>& s, int multiplicity, int max_iter) {
  using Complex = complex_t<Real>;
  const auto r = static_cast<std::size_t>(multiplicity);
  const Real tiny = machine_epsilon<Real>() * Real(4);
  for (int it = 0; it < max_iter; ++it) {
    auto c = characteristic_taylor<Real>(model, s, r + 1);
    if (c[r] == Complex(0)) return false;
    Complex step = c[r - 1] / (c[r] * Complex(Real(static_cast<long>(r))));
    s -= step;
    Real size = cabs<Real>(s);
    if (!(size < Real(2))) return false;
    if (cabs<Real>(step) <= tiny * (Real(1) + size)) break;
  }
  return true;
}

inline std::vector<std::complex<double>> poisson_branch_candidates(const RiskModel& model, long reduced) {
  double total_lambda = 0.0;
  for (const auto& d : model.seasons) total_lambda += d.lambda();
  std::vector<std::complex<double>> out;
  const double rate = total_lambda / static_cast<double>(reduced);
  for (long k = 1; k < reduced; ++k) {
    std::complex<double> omega = std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(reduced));
    std::complex<double> s = 0.0;
    // contraction with factor rate < 1 on the closed disk
    for (int it = 0; it < 4000; ++it) {
      std::complex<double> next = omega * std::exp(rate * (s - 1.0));
      bool done = std::abs(next - s) <= 1e-15;
      s = next;
      if (done) break;
    }
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::complex<double>> companion_candidates(const RiskModel& model, long reduced,
                                                              double truncation_eps) {
  // G_{S_N}(s) / s^delta as a truncated polynomial, minus s^(kappa*N - delta)
  std::vector<double> poly{1.0};
  for (const auto& d : model.seasons) {
    auto t = truncate(d, truncation_eps).probs;
    auto lo = static_cast<std::size_t>(d.min_support());
    std::vector<double> shifted(t.begin() + static_cast<long>(lo), t.end());
    std::vector<double> next(poly.size() + shifted.size() - 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (std::size_t j = 0; j < shifted.size(); ++j) next[i + j] += poly[i] * shifted[j];
    }
    poly = std::move(next);
  }
  const auto m = static_cast<std::size_t>(reduced);
  if (poly.size() < m + 1) poly.resize(m + 1, 0.0);
  poly[m] -= 1.0;
  return polynomial_roots(poly);
}

}  // namespace detail

/// Roots in double precision (see characteristic_roots).
inline RootSet<double> isolate_roots(const RiskModel& model, const RootConfig& cfg = {}) {
  model.validate();
  const double margin = net_profit_margin(model);
  if (!(margin > 0.0)) {
    throw NetProfitViolated("net profit condition E S_N < kappa*N does not hold (margin " +
                            std::to_string(margin) + ")");
  }
  const long total = model.cycle_premium();
  const long delta = cycle_min_support(model);
  const long reduced = total - delta;

  bool all_poisson = std::all_of(model.seasons.begin(), model.seasons.end(),
                                 [](const DiscreteDist& d) { return d.is_poisson(); });
  std::vector<std::complex<double>> raw =
      all_poisson ? detail::poisson_branch_candidates(model, reduced)
                  : detail::companion_candidates(model, reduced, cfg.truncation_eps);

  std::vector<std::complex<double>> kept;
  for (auto s : raw) {
    if (!(std::abs(s) <= 1.0 + 1e-3) || std::abs(s) < 1e-300) continue;
    if (!detail::newton_polish<double>(model, s, 1, cfg.max_newton)) continue;
    if (std::abs(s) > 1.0 + cfg.disk_band) continue;
    if (std::abs(s - 1.0) <= cfg.exclusion_tol) continue;
    kept.push_back(s);
  }

  RootSet<double> out = cluster_multiplicities(kept, cfg.cluster_tol);
  out.method = all_poisson ? "poisson-branch-iteration" : "companion-matrix";
  for (auto& root : out.roots) {
    if (root.multiplicity > 1) {
      detail::newton_polish<double>(model, root.value, root.multiplicity, cfg.max_newton);
    }
    // derivative test: |h^(k)| small for k < r, not for k = r
    auto c = characteristic_taylor<double>(model, root.value, static_cast<std::size_t>(root.multiplicity) + 1);
    double fact = 1.0;
    bool ok = true;
    for (int k = 1; k <= root.multiplicity; ++k) {
      fact *= k;
      double deriv = std::abs(c[static_cast<std::size_t>(k)]) * fact;
      if (k < root.multiplicity && deriv > cfg.derivative_tol) ok = false;
      if (k == root.multiplicity && deriv <= cfg.derivative_tol) ok = false;
    }
    root.multiplicity_confirmed = ok;
    root.in_band = std::abs(root.value) > 1.0;
    if (root.in_band) out.band_used = true;
  }

  // conjugate closure: snap near-real roots, pair the rest
  for (auto& root : out.roots) {
    if (std::abs(root.value.imag()) <= 1e-12 * std::max(1.0, std::abs(root.value))) {
      root.value = {root.value.real(), 0.0};
    }
  }
  for (auto& root : out.roots) {
    if (root.value.imag() <= 0.0) continue;
    for (auto& other : out.roots) {
      if (other.value.imag() < 0.0 && std::abs(other.value - std::conj(root.value)) <= 1e-6 &&
          other.multiplicity == root.multiplicity) {
        other.value = std::conj(root.value);
        break;
      }
    }
  }

  if (delta > 0) {
    Root<double> zero;
    zero.value = 0.0;
    zero.multiplicity = static_cast<int>(delta);
    zero.at_zero = true;
    out.roots.insert(out.roots.begin(), zero);
    out.total_with_multiplicity += static_cast<int>(delta);
  }
  for (auto& root : out.roots) root.residual = std::abs(characteristic_value<double>(model, root.value));

  std::sort(out.roots.begin(), out.roots.end(), [](const Root<double>& a, const Root<double>& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  if (out.total_with_multiplicity != total - 1) {
    throw RootCountMismatch("found " + std::to_string(out.total_with_multiplicity) +
                            " roots counted with multiplicity, expected " + std::to_string(total - 1) +
                            "; tighten the truncation or cluster tolerance");
  }
  return out;
}

/// Roots of s^(kappa*N) = G_{S_N}(s) in |s| <= 1, s != 1, with multiplicities,
/// refined in precision Real.
template <class Real = double>
RootSet<Real> characteristic_roots(const RiskModel& model, const RootConfig& cfg = {}) {
  RootSet<double> base = isolate_roots(model, cfg);
  if constexpr (std::is_same_v<Real, double>) {
    return base;
  } else {
    RootSet<Real> out;
    out.total_with_multiplicity = base.total_with_multiplicity;
    out.band_used = base.band_used;
    out.method = base.method;
    for (const auto& r : base.roots) {
      Root<Real> root;
      root.multiplicity = r.multiplicity;
      root.at_zero = r.at_zero;
      root.in_band = r.in_band;
      root.multiplicity_confirmed = r.multiplicity_confirmed;
      root.value = from_complex_double<Real>(r.value);
      if (!r.at_zero) {
        detail::newton_polish<Real>(model, root.value, r.multiplicity, cfg.max_newton);
        if (r.value.imag() == 0.0) root.value = complex_t<Real>(re<Real>(root.value), Real(0));
      }
      root.residual = to_double(cabs<Real>(characteristic_value<Real>(model, root.value)));
      out.roots.push_back(root);
    }
    // conjugate partners get exactly conjugate refined values
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
      if (!(im<Real>(out.roots[i].value) > Real(0))) continue;
      for (std::size_t j = 0; j < out.roots.size(); ++j) {
        if (im<Real>(out.roots[j].value) < Real(0) &&
            std::abs(to_complex_double<Real>(out.roots[j].value) -
                     std::conj(to_complex_double<Real>(out.roots[i].value))) <= 1e-6) {
          out.roots[j].value = cconj<Real>(out.roots[i].value);
          break;
        }
      }
    }
    return out;
  }
}

}  // namespace seasonal_ruin
