#pragma once

// The kappa*N x kappa*N boundary system for the initial masses m_i^(j) =
// P(M_j = i), i < kappa, of the supremum variables.
//
// Block j (j = 1..N) multiplies m^(j) and is paired with X_{j-1} (X_0 = X_N)
// and with the prefix factor P_j(s) = G_{X_N + X_1 + ... + X_{j-2}}(s). For a
// root alpha the coefficient of m_i^(j) is
//
//   sum_{l=i}^{kappa-1} F_{X_{j-1}}(l - i) P_j(alpha) alpha^(l - kappa(j-1)),
//
// and a root of multiplicity r adds the derivatives of order 1..r-1 of the
// same expression. The last row is the mean equation with right-hand side
// kappa*N - E S_N.
//
// When X_{j-1} has minimal support d > 0 the columns i >= kappa - d vanish
// identically, and the lower bound of M_j (propagated around the cycle) can
// force further masses to zero. Those unknowns are removed; their number
// equals the minimal support of S_N, i.e. the multiplicity of the root s = 0,
// which contributes no rows.

#include "seasonal_ruin/linalg.hpp"
#include "seasonal_ruin/roots.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace seasonal_ruin {

struct RowTag {
  enum class Kind { RootEquation, Derivative, MeanEquation };
  Kind kind = Kind::RootEquation;
  /// Index into the RootSet (unused for the mean equation).
  int root = -1;
  /// Derivative order, 0 for plain root equations.
  int order = 0;
};

struct Unknown {
  long block = 1;  // j
  long index = 0;  // i
};

template <class Real = double>
struct AssembledSystem {
  std::size_t size = 0;
  std::vector<complex_t<Real>> matrix;  // row-major size x size
  std::vector<complex_t<Real>> rhs;
  std::vector<RowTag> row_tags;
  std::vector<Unknown> column_map;
  /// Unknowns removed from the system (their masses are zero or follow from
  /// the mass-extension equations).
  std::vector<Unknown> removed;
  /// Removed unknowns whose mass is known to be zero.
  std::vector<Unknown> known_zero;

  complex_t<Real>& at(std::size_t r, std::size_t c) { return matrix[r * size + c]; }
  const complex_t<Real>& at(std::size_t r, std::size_t c) const { return matrix[r * size + c]; }
};

enum class MassStatus { Solved, StructuralZero, Deferred };

template <class Real = double>
struct BoundaryMasses {
  long kappa = 1;
  /// m[j-1][i] = m_i^(j), i = 0..kappa-1.
  std::vector<std::vector<Real>> m;
  std::vector<std::vector<MassStatus>> status;
  double condition = 0.0;
  double log10_abs_det = 0.0;
  double max_imaginary = 0.0;

  const Real& operator()(long j, long i) const {
    return m[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
  }
};

struct BoundaryConfig {
  double condition_limit = 1e12;
  double imaginary_tol = 1e-8;
  double clamp_tol = 1e-9;
};

// ---------------------------------------------------------------------------

/// Lower bounds L_j of the supports of M_j: L_{j-1} = max(0, L_j + d_j - kappa)
/// with d_j the minimal support of X_{j-1}, solved as a cyclic fixed point.
inline std::vector<long> supremum_lower_bounds(const RiskModel& model) {
  const long n = model.periods();
  std::vector<long> lb(static_cast<std::size_t>(n), 0);
  auto idx = [n](long j) { return static_cast<std::size_t>(((j - 1) % n + n) % n); };
  for (long sweep = 0; sweep < 4 * n + 8; ++sweep) {
    bool changed = false;
    for (long j = n; j >= 1; --j) {
      long v = std::max(0L, lb[idx(j)] + model.block_claim(j).min_support() - model.kappa);
      if (lb[idx(j - 1)] != v) {
        lb[idx(j - 1)] = v;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return lb;
}

namespace detail {

/// Taylor coefficients about alpha of P_j(s) s^e, e = l - kappa(j-1), for
/// l = 0..kappa-1; only the leading coefficient is needed for plain rows.
template <class Real>
std::vector<std::vector<complex_t<Real>>> block_kernels(const RiskModel& model, long j,
                                                        const complex_t<Real>& alpha, std::size_t terms) {
  using Complex = complex_t<Real>;
  std::vector<Complex> prefix(terms, Complex(0));
  prefix[0] = Complex(1);
  for (long k = 1; k < j; ++k) {
    prefix = series::multiply(prefix, pgf_taylor<Real>(model.block_claim(k), alpha, terms), terms);
  }
  std::vector<std::vector<Complex>> out;
  for (long l = 0; l < model.kappa; ++l) {
    long e = l - model.kappa * (j - 1);
    out.push_back(series::multiply(prefix, series::power_taylor(alpha, e, terms), terms));
  }
  return out;
}

}  // namespace detail

/// Assembles the reduced boundary system for the given roots.
template <class Real>
AssembledSystem<Real> build_system(const RiskModel& model, const RootSet<Real>& roots) {
  using Complex = complex_t<Real>;
  model.validate();
  const long kappa = model.kappa;
  const long n = model.periods();
  const auto lb = supremum_lower_bounds(model);

  AssembledSystem<Real> sys;
  for (long j = 1; j <= n; ++j) {
    const long d = model.block_claim(j).min_support();
    for (long i = 0; i < kappa; ++i) {
      bool zero_column = i >= kappa - d;
      bool zero_mass = i < lb[static_cast<std::size_t>(j - 1)];
      if (zero_column || zero_mass) {
        sys.removed.push_back({j, i});
        if (zero_mass) sys.known_zero.push_back({j, i});
      } else {
        sys.column_map.push_back({j, i});
      }
    }
  }

  int zero_multiplicity = 0;
  for (std::size_t r = 0; r < roots.roots.size(); ++r) {
    const auto& root = roots.roots[r];
    if (root.at_zero) {
      zero_multiplicity += root.multiplicity;
      continue;
    }
    for (int order = 0; order < root.multiplicity; ++order) {
      sys.row_tags.push_back({order == 0 ? RowTag::Kind::RootEquation : RowTag::Kind::Derivative,
                              static_cast<int>(r), order});
    }
  }
  sys.row_tags.push_back({RowTag::Kind::MeanEquation, -1, 0});

  const std::size_t rows = sys.row_tags.size();
  const std::size_t cols = sys.column_map.size();
  if (rows != cols) {
    throw DimensionMismatch("boundary system has " + std::to_string(rows) + " equations for " +
                            std::to_string(cols) + " unknowns (" + std::to_string(sys.removed.size()) +
                            " removed, zero root multiplicity " + std::to_string(zero_multiplicity) + ")");
  }
  sys.size = rows;
  sys.matrix.assign(rows * cols, Complex(0));
  sys.rhs.assign(rows, Complex(0));

  // F_{X_{j-1}}(0..kappa-1) and x_{0..kappa-1} per block
  std::vector<std::vector<Real>> pmfs(static_cast<std::size_t>(n));
  std::vector<std::vector<Real>> cdfs(static_cast<std::size_t>(n));
  for (long j = 1; j <= n; ++j) {
    auto p = pmf_prefix<Real>(model.block_claim(j), static_cast<std::size_t>(kappa));
    std::vector<Real> c(p.size());
    Real acc(0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      c[i] = acc;
    }
    pmfs[static_cast<std::size_t>(j - 1)] = std::move(p);
    cdfs[static_cast<std::size_t>(j - 1)] = std::move(c);
  }

  std::size_t row = 0;
  for (const auto& root : roots.roots) {
    if (root.at_zero) continue;
    const auto terms = static_cast<std::size_t>(root.multiplicity);
    std::vector<std::vector<std::vector<Complex>>> kernels;
    for (long j = 1; j <= n; ++j) kernels.push_back(detail::block_kernels<Real>(model, j, root.value, terms));
    for (std::size_t order = 0; order < terms; ++order, ++row) {
      for (std::size_t c = 0; c < cols; ++c) {
        const auto [j, i] = sys.column_map[c];
        const auto& cdf = cdfs[static_cast<std::size_t>(j - 1)];
        const auto& ker = kernels[static_cast<std::size_t>(j - 1)];
        Complex acc(0);
        for (long l = i; l < kappa; ++l) {
          acc += Complex(cdf[static_cast<std::size_t>(l - i)]) * ker[static_cast<std::size_t>(l)][order];
        }
        sys.at(row, c) = acc;
      }
    }
  }

  for (std::size_t c = 0; c < cols; ++c) {
    const auto [j, i] = sys.column_map[c];
    const auto& x = pmfs[static_cast<std::size_t>(j - 1)];
    Real acc(0);
    for (long t = 0; t <= kappa - 1 - i; ++t) acc += x[static_cast<std::size_t>(t)] * Real(kappa - i - t);
    sys.at(row, c) = Complex(acc);
  }
  sys.rhs[row] = Complex(Real(model.cycle_premium()) - expected_cycle_claims_as<Real>(model));
  return sys;
}

/// Solves the boundary system. Removed unknowns are reported as zero with
/// status StructuralZero (known zero mass) or Deferred (to be recovered by the
/// mass-extension equations).
template <class Real>
BoundaryMasses<Real> solve_boundary(const RiskModel& model, const RootSet<Real>& roots,
                                    const BoundaryConfig& cfg = {}) {
  auto sys = build_system<Real>(model, roots);
  const double cond = condition_number<Real>(sys.matrix, sys.size);
  auto lu = lu_factor<Real>(sys.matrix, sys.size);
  if (lu.singular || !(cond <= cfg.condition_limit)) {
    throw SingularSystem("boundary system is singular or ill-conditioned (condition " + std::to_string(cond) + ")",
                         cond, lu.log10_abs_det());
  }
  auto x = lu.solve(sys.rhs);

  BoundaryMasses<Real> out;
  out.kappa = model.kappa;
  out.condition = cond;
  out.log10_abs_det = lu.log10_abs_det();
  out.m.assign(static_cast<std::size_t>(model.periods()),
               std::vector<Real>(static_cast<std::size_t>(model.kappa), Real(0)));
  out.status.assign(static_cast<std::size_t>(model.periods()),
                    std::vector<MassStatus>(static_cast<std::size_t>(model.kappa), MassStatus::Deferred));
  for (const auto& u : sys.known_zero) {
    out.status[static_cast<std::size_t>(u.block - 1)][static_cast<std::size_t>(u.index)] = MassStatus::StructuralZero;
  }
  for (std::size_t c = 0; c < sys.size; ++c) {
    const auto [j, i] = sys.column_map[c];
    double imag_part = std::abs(to_double(im<Real>(x[c])));
    out.max_imaginary = std::max(out.max_imaginary, imag_part);
    Real v = re<Real>(x[c]);
    if (v < Real(-cfg.clamp_tol) || v > Real(1 + cfg.clamp_tol)) {
      throw NegativeMass("boundary mass m_" + std::to_string(i) + "^(" + std::to_string(j) + ") = " +
                         std::to_string(to_double(v)) + " lies outside [0,1]");
    }
    if (v < Real(0)) v = Real(0);
    if (v > Real(1)) v = Real(1);
    out.m[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] = v;
    out.status[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] = MassStatus::Solved;
  }
  if (out.max_imaginary > cfg.imaginary_tol) {
    throw ImaginaryResidue("boundary solution has imaginary part " + std::to_string(out.max_imaginary));
  }
  return out;
}

/// Residual of each row of the system at the given masses (Solved entries
/// only), in row order.
template <class Real>
std::vector<double> boundary_residuals(const AssembledSystem<Real>& sys, const BoundaryMasses<Real>& b) {
  std::vector<double> out;
  for (std::size_t r = 0; r < sys.size; ++r) {
    complex_t<Real> acc = -sys.rhs[r];
    for (std::size_t c = 0; c < sys.size; ++c) {
      const auto [j, i] = sys.column_map[c];
      acc += sys.at(r, c) * complex_t<Real>(b(j, i));
    }
    out.push_back(to_double(cabs<Real>(acc)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Randomized probe of the non-singularity conjecture.

struct ProbeFinding {
  long kappa = 0;
  long periods = 0;
  double condition = 0.0;
  double log10_abs_det = 0.0;
  std::string note;
};

struct ProbeReport {
  long trials = 0;
  long kappa_max = 0;
  long periods_max = 0;
  std::uint64_t seed = 0;
  long evaluated = 0;
  double min_log10_abs_det = std::numeric_limits<double>::infinity();
  double max_condition = 0.0;
  long singular_instances = 0;
  std::vector<ProbeFinding> findings;
};

/// Random table with P(X = 0) > 0 and support length in [1, max_len].
inline DiscreteDist random_table(std::mt19937_64& rng, long max_len) {
  std::uniform_int_distribution<long> len_dist(1, max_len);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  const long len = len_dist(rng);
  std::vector<double> p(static_cast<std::size_t>(len));
  double total = 0.0;
  for (auto& v : p) {
    v = w(rng);
    total += v;
  }
  p[0] += 0.05 * total;
  total *= 1.05;
  for (auto& v : p) v /= total;
  double sum = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) sum += p[i];
  p[0] = 1.0 - sum;
  return DiscreteDist::table(std::move(p));
}

/// Random model with kappa <= kappa_max, N <= n_max, seasons drawn by
/// random_table with support up to 2*kappa + 1, net profit enforced by
/// rejection.
inline RiskModel random_model(std::mt19937_64& rng, long kappa_max, long n_max) {
  std::uniform_int_distribution<long> kd(1, kappa_max);
  std::uniform_int_distribution<long> nd(1, n_max);
  for (;;) {
    const long kappa = kd(rng);
    const long n = nd(rng);
    std::vector<DiscreteDist> seasons;
    for (long k = 0; k < n; ++k) seasons.push_back(random_table(rng, 2 * kappa + 2));
    RiskModel m(kappa, std::move(seasons));
    if (net_profit_margin(m) > 1e-3) return m;
  }
}

inline ProbeReport probe_conjecture(long kappa_max, long n_max, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (kappa_max < 1 || n_max < 1) throw std::invalid_argument("kappa_max and n_max must be positive");
  ProbeReport rep;
  rep.trials = trials;
  rep.kappa_max = kappa_max;
  rep.periods_max = n_max;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  for (long t = 0; t < trials; ++t) {
    RiskModel model = random_model(rng, kappa_max, n_max);
    try {
      auto roots = characteristic_roots<double>(model);
      auto sys = build_system<double>(model, roots);
      double cond = condition_number<double>(sys.matrix, sys.size);
      auto lu = lu_factor<double>(sys.matrix, sys.size);
      double ldet = lu.log10_abs_det();
      ++rep.evaluated;
      rep.max_condition = std::max(rep.max_condition, cond);
      rep.min_log10_abs_det = std::min(rep.min_log10_abs_det, ldet);
      if (lu.singular || !(cond <= 1e12)) {
        ++rep.singular_instances;
        rep.findings.push_back({model.kappa, model.periods(), cond, ldet, "condition above 1e12"});
      }
    } catch (const RuinError& e) {
      rep.findings.push_back({model.kappa, model.periods(), 0.0, 0.0, e.what()});
    }
  }
  return rep;
}

}  // namespace seasonal_ruin
