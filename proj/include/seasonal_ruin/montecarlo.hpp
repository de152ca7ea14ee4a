#pragma once

// Monte Carlo estimates of finite-time survival. Paths are simulated in fixed
// chunks; chunk c draws from mt19937_64 seeded with splitmix64(seed, c), so an
// estimate depends only on (model, u, horizon, paths, seed) and not on the
// number of worker threads.

#include "seasonal_ruin/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace seasonal_ruin {

inline constexpr const char* rng_id = "mt19937_64/splitmix64-chunked";
inline constexpr long mc_chunk = 1L << 16;

struct SimConfig {
  long paths = 100000;
  long horizon = 1;
  std::uint64_t seed = 1;
  long u = 0;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    if (paths < 1) throw std::invalid_argument("paths must be at least 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (u < 0) throw std::invalid_argument("initial surplus must be non-negative");
  }
};

struct Estimate {
  double p_hat = 0.0;
  double half_width_95 = 0.0;
  long paths = 0;
  long survived = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(chunk + 1)));
}

/// Inversion sampler over the cumulative distribution of one season.
class ClaimSampler {
 public:
  explicit ClaimSampler(const DiscreteDist& d) {
    auto t = truncate(d, 1e-17).probs;
    double acc = 0.0;
    for (double p : t) {
      acc += p;
      cdf_.push_back(acc);
    }
    first_ = d.min_support();
  }

  long operator()(std::mt19937_64& rng) const {
    const double u = std::generate_canonical<double, 64>(rng);
    auto k = static_cast<long>(first_);
    const long n = static_cast<long>(cdf_.size());
    while (k < n && u >= cdf_[static_cast<std::size_t>(k)]) ++k;
    return std::min(k, n - 1);
  }

 private:
  std::vector<double> cdf_;
  long first_ = 0;
};

inline std::vector<ClaimSampler> make_samplers(const RiskModel& model) {
  std::vector<ClaimSampler> out;
  for (const auto& d : model.seasons) out.emplace_back(d);
  return out;
}

/// True iff W(n) = u + kappa n - (X_1 + ... + X_n) > 0 for n = 1..horizon.
inline bool simulate_path(const RiskModel& model, const std::vector<ClaimSampler>& samplers, long u, long horizon,
                          std::mt19937_64& rng) {
  long w = u;
  const long n = model.periods();
  for (long t = 0; t < horizon; ++t) {
    w += model.kappa - samplers[static_cast<std::size_t>(t % n)](rng);
    if (w <= 0) return false;
  }
  return true;
}

inline bool simulate_path(const RiskModel& model, long u, long horizon, std::mt19937_64& rng) {
  return simulate_path(model, make_samplers(model), u, horizon, rng);
}

namespace detail {

/// Runs `body(chunk_index, first_path, path_count)` over all chunks on a pool
/// of threads; each thread accumulates into its own slot.
template <class Body>
void for_each_chunk(long paths, unsigned threads, Body&& body) {
  const long chunks = (paths + mc_chunk - 1) / mc_chunk;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, chunks));
  auto run = [&](unsigned w) {
    for (long c = w; c < chunks; c += workers) {
      const long first = c * mc_chunk;
      body(static_cast<unsigned>(w), c, std::min(mc_chunk, paths - first));
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

inline unsigned worker_count(long paths, unsigned threads) {
  const long chunks = (paths + mc_chunk - 1) / mc_chunk;
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::max<long>(1, std::min<long>(workers, chunks)));
}

}  // namespace detail

inline Estimate make_estimate(long survived, long paths) {
  Estimate e;
  e.paths = paths;
  e.survived = survived;
  e.p_hat = static_cast<double>(survived) / static_cast<double>(paths);
  e.half_width_95 = 1.96 * std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(paths));
  return e;
}

/// Fraction of simulated paths with W(n) > 0 for all n <= horizon.
inline Estimate estimate_survival(const RiskModel& model, const SimConfig& cfg) {
  cfg.validate();
  model.validate();
  const auto samplers = make_samplers(model);
  std::vector<long> counts(detail::worker_count(cfg.paths, cfg.threads), 0);
  detail::for_each_chunk(cfg.paths, cfg.threads, [&](unsigned w, long chunk, long count) {
    auto rng = chunk_engine(cfg.seed, static_cast<std::uint64_t>(chunk));
    long ok = 0;
    for (long p = 0; p < count; ++p) ok += simulate_path(model, samplers, cfg.u, cfg.horizon, rng) ? 1 : 0;
    counts[w] += ok;
  });
  long total = 0;
  for (long c : counts) total += c;
  return make_estimate(total, cfg.paths);
}

/// Survivor counts for every u <= u_max and t <= horizon from the same paths:
/// a path survives (u, t) iff u + min_{n<=t} (kappa n - S_n) > 0.
struct SurvivalGridEstimate {
  long u_max = 0;
  long horizon = 0;
  long paths = 0;
  /// survived[t-1][u]
  std::vector<std::vector<long>> survived;

  Estimate at(long u, long t) const {
    return make_estimate(survived[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(u)], paths);
  }
};

inline SurvivalGridEstimate estimate_survival_grid(const RiskModel& model, long u_max, const SimConfig& cfg) {
  cfg.validate();
  model.validate();
  if (u_max < 0) throw std::invalid_argument("u_max must be non-negative");
  const auto samplers = make_samplers(model);
  const auto T = static_cast<std::size_t>(cfg.horizon);
  const auto width = static_cast<std::size_t>(u_max) + 2;
  const unsigned workers = detail::worker_count(cfg.paths, cfg.threads);
  // hist[w][t][k]: paths whose smallest surviving u at time t is k (k = u_max+1: none)
  std::vector<std::vector<long>> hist(workers, std::vector<long>(T * width, 0));
  detail::for_each_chunk(cfg.paths, cfg.threads, [&](unsigned w, long chunk, long count) {
    auto rng = chunk_engine(cfg.seed, static_cast<std::uint64_t>(chunk));
    auto& h = hist[w];
    const long n = model.periods();
    for (long p = 0; p < count; ++p) {
      long level = 0;
      long lowest = 0;
      bool first = true;
      for (std::size_t t = 0; t < T; ++t) {
        level += model.kappa - samplers[t % static_cast<std::size_t>(n)](rng);
        if (first || level < lowest) lowest = level;
        first = false;
        const long need = std::max(0L, 1 - lowest);
        h[t * width + static_cast<std::size_t>(std::min<long>(need, u_max + 1))] += 1;
      }
    }
  });
  SurvivalGridEstimate out;
  out.u_max = u_max;
  out.horizon = cfg.horizon;
  out.paths = cfg.paths;
  out.survived.assign(T, std::vector<long>(static_cast<std::size_t>(u_max) + 1, 0));
  for (std::size_t t = 0; t < T; ++t) {
    long acc = 0;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(u_max); ++k) {
      for (const auto& h : hist) acc += h[t * width + k];
      out.survived[t][k] = acc;
    }
  }
  return out;
}

/// Wilson score interval for a binomial proportion at normal quantile z.
inline std::pair<double, double> wilson_interval(long successes, long trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct TrajectoryPoint {
  long n = 0;
  long season = 0;
  long claim = 0;
  long surplus = 0;
};

/// One simulated path W(0..steps), starting with the row n = 0.
inline std::vector<TrajectoryPoint> trajectory(const RiskModel& model, long u, long steps, std::uint64_t seed) {
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  model.validate();
  const auto samplers = make_samplers(model);
  auto rng = chunk_engine(seed, 0);
  std::vector<TrajectoryPoint> out{{0, 0, 0, u}};
  long w = u;
  for (long t = 1; t <= steps; ++t) {
    const long season = (t - 1) % model.periods() + 1;
    const long x = samplers[static_cast<std::size_t>(season - 1)](rng);
    w += model.kappa - x;
    out.push_back({t, season, x, w});
  }
  return out;
}

}  // namespace seasonal_ruin
