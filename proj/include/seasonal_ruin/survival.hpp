#pragma once

// Ultimate-time survival phi(u) from the boundary masses, finite-time survival
// phi(u, T) by dynamic programming, and the regimes without net profit.

#include "seasonal_ruin/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace seasonal_ruin {

enum class Regime { NetProfit, Supercritical, CriticalNondegenerate, Degenerate };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::NetProfit:
      return "NetProfit";
    case Regime::Supercritical:
      return "Supercritical";
    case Regime::CriticalNondegenerate:
      return "CriticalNondegenerate";
    case Regime::Degenerate:
      return "Degenerate";
  }
  return "?";
}

/// Margins within this distance of zero count as critical.
inline constexpr double critical_tol = 1e-12;

inline Regime classify_regime(const RiskModel& model) {
  model.validate();
  const double margin = net_profit_margin(model);
  const double scale = std::max(1.0, static_cast<double>(model.cycle_premium()));
  if (margin > critical_tol * scale) return Regime::NetProfit;
  if (margin < -critical_tol * scale) return Regime::Supercritical;
  bool all_point = std::all_of(model.seasons.begin(), model.seasons.end(),
                               [](const DiscreteDist& d) { return d.point_mass().has_value(); });
  return all_point ? Regime::Degenerate : Regime::CriticalNondegenerate;
}

// ---------------------------------------------------------------------------
// Mass extension

/// m[j-1][n] = P(M_j = n).
template <class Real = double>
struct MassSequence {
  std::vector<std::vector<Real>> m;

  const std::vector<Real>& block(long j) const { return m[static_cast<std::size_t>(j - 1)]; }
};

/// Sets masses in [-tol, 0) to zero; anything more negative is an error.
template <class Real>
Real clamp_mass(const Real& v, double tol, long j, long n) {
  if (v < Real(0)) {
    if (v < Real(-tol)) {
      throw NegativeMass("mass m_" + std::to_string(n) + "^(" + std::to_string(j) + ") = " +
                         std::to_string(to_double(v)));
    }
    return Real(0);
  }
  return v;
}

/// Extends the boundary masses to m_n^(j), n <= n_max, for every block.
///
/// Block j satisfies, for t >= kappa - d (d the minimal support of X_{j-1}),
///
///   m_t^(j) x_d = m_{t+d-kappa}^(j-1) - sum_{i<t} m_i^(j) x_{t+d-i}
///                 - [t + d = kappa] sum_{i<kappa} m_i^(j) F_{X_{j-1}}(kappa-1-i),
///
/// with block 0 read as block N. Blocks are advanced in whatever order their
/// dependencies allow.
template <class Real>
MassSequence<Real> extend_masses(const RiskModel& model, const BoundaryMasses<Real>& b, long n_max,
                                 double clamp_tol = 1e-9) {
  const long kappa = model.kappa;
  const long n_blocks = model.periods();
  if (n_max < kappa - 1) n_max = kappa - 1;
  const long delta = cycle_min_support(model);
  // the chain of dependencies from block 1 never reaches beyond n_max + delta
  const long horizon = n_max + delta + 1;
  const auto len = static_cast<std::size_t>(horizon + 1);

  std::vector<long> d(static_cast<std::size_t>(n_blocks));
  std::vector<std::vector<Real>> x(static_cast<std::size_t>(n_blocks));
  std::vector<Real> c(static_cast<std::size_t>(n_blocks), Real(0));
  MassSequence<Real> out;
  out.m.assign(static_cast<std::size_t>(n_blocks), {});
  std::vector<long> known(static_cast<std::size_t>(n_blocks));

  for (long j = 1; j <= n_blocks; ++j) {
    const auto jj = static_cast<std::size_t>(j - 1);
    const auto& claim = model.block_claim(j);
    d[jj] = claim.min_support();
    x[jj] = pmf_prefix<Real>(claim, len + static_cast<std::size_t>(d[jj]) + static_cast<std::size_t>(kappa));
    Real f(0);
    std::vector<Real> cdf(static_cast<std::size_t>(kappa));
    for (long i = 0; i < kappa; ++i) {
      f += x[jj][static_cast<std::size_t>(i)];
      cdf[static_cast<std::size_t>(i)] = f;
    }
    known[jj] = std::max(0L, kappa - d[jj]);
    for (long i = 0; i < known[jj]; ++i) {
      out.m[jj].push_back(b(j, i));
      c[jj] += b(j, i) * cdf[static_cast<std::size_t>(kappa - 1 - i)];
    }
  }

  auto prev = [n_blocks](long j) { return j == 1 ? n_blocks : j - 1; };
  bool progress = true;
  while (progress) {
    progress = false;
    for (long j = 1; j <= n_blocks; ++j) {
      const auto jj = static_cast<std::size_t>(j - 1);
      const auto pj = static_cast<std::size_t>(prev(j) - 1);
      auto& mj = out.m[jj];
      while (static_cast<long>(mj.size()) <= horizon) {
        const long t = static_cast<long>(mj.size());
        const long dep = t + d[jj] - kappa;
        if (dep >= static_cast<long>(out.m[pj].size())) break;
        Real acc = out.m[pj][static_cast<std::size_t>(dep)];
        for (long i = 0; i < t; ++i) acc -= mj[static_cast<std::size_t>(i)] * x[jj][static_cast<std::size_t>(t + d[jj] - i)];
        if (t + d[jj] == kappa) acc -= c[jj];
        acc /= x[jj][static_cast<std::size_t>(d[jj])];
        mj.push_back(clamp_mass(acc, clamp_tol, j, t));
        progress = true;
      }
    }
  }
  for (long j = 1; j <= n_blocks; ++j) {
    auto& mj = out.m[static_cast<std::size_t>(j - 1)];
    if (static_cast<long>(mj.size()) <= n_max) {
      throw ZeroDivisor("mass extension for block " + std::to_string(j) + " stalled at n = " +
                        std::to_string(mj.size()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// The first-cycle recurrence
//
//   phi(u) = sum_{i_1 <= u+kappa-1, ..., i_1+...+i_N <= u+kappa N-1}
//            x_{i_1}^(1) ... x_{i_N}^(N) phi(u + kappa N - (i_1+...+i_N)),
//
// evaluated through the weights w_u(s) of the constrained partial sums.

/// w[s] = P(partial sums respect the bounds, i_1 + ... + i_N = s).
template <class Real>
std::vector<Real> first_cycle_weights(const RiskModel& model, long u) {
  const long kappa = model.kappa;
  const long n = model.periods();
  std::vector<Real> w{Real(1)};
  for (long k = 1; k <= n; ++k) {
    const long bound = u + kappa * k - 1;
    if (bound < 0) return std::vector<Real>(1, Real(0));
    auto x = pmf_prefix<Real>(model.claim(k), static_cast<std::size_t>(bound) + 1);
    std::vector<Real> next(static_cast<std::size_t>(bound) + 1, Real(0));
    for (std::size_t s = 0; s < w.size(); ++s) {
      if (w[s] == Real(0)) continue;
      for (std::size_t i = 0; s + i <= static_cast<std::size_t>(bound); ++i) {
        if (x[i] == Real(0)) continue;
        next[s + i] += w[s] * x[i];
      }
    }
    w = std::move(next);
  }
  return w;
}

/// phi(0) from phi(1), ..., phi(kappa N) (phi[k] = phi(k), phi[0] ignored).
template <class Real>
Real survival_at_zero(const RiskModel& model, const std::vector<Real>& phi) {
  const long total = model.cycle_premium();
  auto w = first_cycle_weights<Real>(model, 0);
  Real acc(0);
  for (std::size_t s = 0; s < w.size(); ++s) {
    const long arg = total - static_cast<long>(s);
    if (arg >= 1) acc += w[s] * phi[static_cast<std::size_t>(arg)];
  }
  return acc;
}

/// phi(0), ..., phi(u_max) from phi(1), ..., phi(kappa N) by the first-cycle
/// recurrence alone: phi(0) directly, then phi(v) for v > kappa N from the
/// equation at u = v - kappa N + delta, whose top term is phi(v).
template <class Real>
std::vector<Real> survival_via_block_recurrence(const RiskModel& model, const std::vector<Real>& phi_init,
                                                long u_max) {
  const long total = model.cycle_premium();
  if (static_cast<long>(phi_init.size()) != total) {
    throw std::invalid_argument("phi_init must hold phi(1), ..., phi(kappa N)");
  }
  const long delta = cycle_min_support(model);
  std::vector<Real> phi(static_cast<std::size_t>(std::max(u_max, total)) + 1, Real(0));
  for (long k = 1; k <= total; ++k) phi[static_cast<std::size_t>(k)] = phi_init[static_cast<std::size_t>(k - 1)];
  phi[0] = survival_at_zero(model, phi);
  for (long v = total + 1; v <= u_max; ++v) {
    const long u = v - total + delta;
    auto w = first_cycle_weights<Real>(model, u);
    const auto top = static_cast<std::size_t>(delta);
    if (top >= w.size() || w[top] == Real(0)) {
      throw ZeroDivisor("first-cycle recurrence has no leading term at u = " + std::to_string(u));
    }
    Real acc = phi[static_cast<std::size_t>(u)];
    for (std::size_t s = top + 1; s < w.size(); ++s) {
      acc -= w[s] * phi[static_cast<std::size_t>(u + total - static_cast<long>(s))];
    }
    phi[static_cast<std::size_t>(v)] = acc / w[top];
  }
  phi.resize(static_cast<std::size_t>(u_max) + 1);
  return phi;
}

// ---------------------------------------------------------------------------
// Ultimate-time survival

struct SurvivalOptions {
  /// Decimal digits of the working precision; 0 selects it automatically.
  int precision = 0;
  RootConfig roots;
  BoundaryConfig boundary;
};

struct SurvivalDiagnostics {
  int digits = 15;
  int requested_digits = 15;
  bool precision_capped = false;
  double condition = 0.0;
  double log10_abs_det = 0.0;
  double min_root_modulus = 1.0;
  double max_imaginary = 0.0;
  bool band_used = false;
  std::string root_method;
};

struct SurvivalTable {
  std::vector<double> phi;
  Regime regime = Regime::NetProfit;
  SurvivalDiagnostics diagnostics;
};

template <class Real>
struct BoundarySolution {
  RootSet<Real> roots;
  BoundaryMasses<Real> masses;
};

template <class Real>
BoundarySolution<Real> solve_model(const RiskModel& model, const SurvivalOptions& opt = {}) {
  BoundarySolution<Real> sol;
  sol.roots = characteristic_roots<Real>(model, opt.roots);
  sol.masses = solve_boundary<Real>(model, sol.roots, opt.boundary);
  return sol;
}

/// Decimal digits needed to carry the unstable recurrences out to index n:
/// their error grows like (1/min|alpha|)^n on top of the system's condition.
inline int required_digits(const RiskModel& model, long n, const SurvivalOptions& opt, double* cond_out = nullptr,
                           double* rho_out = nullptr) {
  auto roots = isolate_roots(model, opt.roots);
  double rho = roots.min_nonzero_modulus();
  double cond = 1.0;
  try {
    auto sys = build_system<double>(model, roots);
    cond = condition_number<double>(sys.matrix, sys.size);
  } catch (const RuinError&) {
    cond = 1e12;
  }
  if (cond_out) *cond_out = cond;
  if (rho_out) *rho_out = rho;
  const double growth = static_cast<double>(std::max(n, model.cycle_premium())) * std::log10(1.0 / std::max(rho, 1e-300));
  const double need = 17.0 + growth + std::log10(std::max(cond, 1.0)) + 8.0;
  return static_cast<int>(std::ceil(need));
}

template <class Real>
std::vector<Real> ultimate_survival_as(const RiskModel& model, long u_max, const SurvivalOptions& opt,
                                       SurvivalDiagnostics* diag = nullptr) {
  auto sol = solve_model<Real>(model, opt);
  const long total = model.cycle_premium();
  const long n_needed = std::max(u_max, total);
  auto masses = extend_masses<Real>(model, sol.masses, n_needed);
  std::vector<Real> phi(static_cast<std::size_t>(n_needed) + 1, Real(0));
  Real acc(0);
  const auto& m1 = masses.block(1);
  for (long u = 1; u <= n_needed; ++u) {
    acc += m1[static_cast<std::size_t>(u - 1)];
    phi[static_cast<std::size_t>(u)] = acc;
  }
  phi[0] = survival_at_zero(model, phi);
  phi.resize(static_cast<std::size_t>(u_max) + 1);
  if (diag) {
    diag->condition = sol.masses.condition;
    diag->log10_abs_det = sol.masses.log10_abs_det;
    diag->max_imaginary = sol.masses.max_imaginary;
    diag->min_root_modulus = sol.roots.min_nonzero_modulus();
    diag->band_used = sol.roots.band_used;
    diag->root_method = sol.roots.method;
  }
  return phi;
}

/// phi(u) = P(W(n) > 0 for all n >= 1), u = 0..u_max.
inline SurvivalTable degenerate_survival(const RiskModel& model, long u_max) {
  // W(n) - u is periodic in n with period N, so its minimum over one cycle
  // decides survival.
  long level = 0;
  long lowest = 0;
  bool first = true;
  for (long n = 1; n <= model.periods(); ++n) {
    level += model.kappa - *model.claim(n).point_mass();
    if (first || level < lowest) lowest = level;
    first = false;
  }
  SurvivalTable t;
  t.regime = Regime::Degenerate;
  for (long u = 0; u <= u_max; ++u) t.phi.push_back(u + lowest > 0 ? 1.0 : 0.0);
  return t;
}

inline SurvivalTable ultimate_survival(const RiskModel& model, long u_max, const SurvivalOptions& opt = {}) {
  if (u_max < 0) throw std::invalid_argument("u_max must be non-negative");
  SurvivalTable table;
  table.regime = classify_regime(model);
  switch (table.regime) {
    case Regime::Supercritical:
    case Regime::CriticalNondegenerate:
      table.phi.assign(static_cast<std::size_t>(u_max) + 1, 0.0);
      return table;
    case Regime::Degenerate:
      return degenerate_survival(model, u_max);
    case Regime::NetProfit:
      break;
  }
  SurvivalDiagnostics diag;
  int digits = opt.precision;
  if (digits <= 0) digits = required_digits(model, u_max, opt);
  diag.requested_digits = digits;
  diag.precision_capped = digits > max_ladder_digits;
  diag.digits = ladder_digits(digits);
  table.phi = with_precision(digits, [&](auto tag) {
    using Real = typename decltype(tag)::type;
    auto phi = ultimate_survival_as<Real>(model, u_max, opt, &diag);
    std::vector<double> out;
    for (const auto& v : phi) out.push_back(std::clamp(to_double(v), 0.0, 1.0));
    return out;
  });
  table.diagnostics = diag;
  return table;
}

// ---------------------------------------------------------------------------
// Finite-time survival

struct FiniteSurvivalTable {
  long u_max = 0;
  long horizon = 0;
  /// phi[t-1][u] = phi(u, t).
  std::vector<std::vector<double>> phi;

  double operator()(long u, long t) const {
    return phi[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(u)];
  }
};

/// phi(u, t) for u <= u_max and t = 1..horizon via
///   phi^(j)(u, 1) = F_{X_j}(u + kappa - 1),
///   phi^(j)(u, t) = sum_{i <= u+kappa-1} phi^(j+1)(u + kappa - i, t - 1) x_i^(j),
/// with seasons taken cyclically; phi(u, t) = phi^(1)(u, t).
inline FiniteSurvivalTable finite_survival(const RiskModel& model, long u_max, long horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (u_max < 0) throw std::invalid_argument("u_max must be non-negative");
  model.validate();
  const long kappa = model.kappa;
  const long n = model.periods();
  const long width = u_max + kappa * (horizon - 1);  // largest surplus ever needed

  std::vector<std::vector<double>> pmfs;
  std::vector<std::vector<double>> cdfs;
  for (long j = 1; j <= n; ++j) {
    auto p = truncate(model.claim(j), 1e-17).probs;
    std::vector<double> c(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      c[i] = acc;
    }
    pmfs.push_back(std::move(p));
    cdfs.push_back(std::move(c));
  }
  auto cdf_at = [&](long j, long k) {
    const auto& c = cdfs[static_cast<std::size_t>(j - 1)];
    if (k < 0) return 0.0;
    if (static_cast<std::size_t>(k) >= c.size()) return c.back();
    return c[static_cast<std::size_t>(k)];
  };
  auto season = [n](long j) { return ((j - 1) % n + n) % n + 1; };

  FiniteSurvivalTable out;
  out.u_max = u_max;
  out.horizon = horizon;
  // layer[j-1][u] = phi^(j)(u, t) for the current t, u <= width - kappa(t-1)
  std::vector<std::vector<double>> layer(static_cast<std::size_t>(n));
  for (long j = 1; j <= n; ++j) {
    auto& l = layer[static_cast<std::size_t>(j - 1)];
    l.resize(static_cast<std::size_t>(width) + 1);
    for (long u = 0; u <= width; ++u) l[static_cast<std::size_t>(u)] = cdf_at(j, u + kappa - 1);
  }
  out.phi.emplace_back(layer[0].begin(), layer[0].begin() + u_max + 1);
  for (long t = 2; t <= horizon; ++t) {
    const long w = width - kappa * (t - 1);
    std::vector<std::vector<double>> next(static_cast<std::size_t>(n));
    for (long j = 1; j <= n; ++j) {
      const auto& x = pmfs[static_cast<std::size_t>(j - 1)];
      const auto& after = layer[static_cast<std::size_t>(season(j + 1) - 1)];
      auto& l = next[static_cast<std::size_t>(j - 1)];
      l.assign(static_cast<std::size_t>(w) + 1, 0.0);
      for (long u = 0; u <= w; ++u) {
        double acc = 0.0;
        const long top = std::min(u + kappa - 1, static_cast<long>(x.size()) - 1);
        for (long i = 0; i <= top; ++i) acc += after[static_cast<std::size_t>(u + kappa - i)] * x[static_cast<std::size_t>(i)];
        l[static_cast<std::size_t>(u)] = acc;
      }
    }
    layer = std::move(next);
    out.phi.emplace_back(layer[0].begin(), layer[0].begin() + u_max + 1);
  }
  return out;
}

}  // namespace seasonal_ruin
