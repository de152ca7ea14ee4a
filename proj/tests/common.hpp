#pragma once

#include "seasonal_ruin/boundary.hpp"
#include "seasonal_ruin/model_io.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline seasonal_ruin::RiskModel fixture(const std::string& name) {
  return seasonal_ruin::load_model(std::string(SEASONAL_RUIN_FIXTURES) + "/" + name + ".json");
}

/// P(X_1 + ... + X_n <= u + kappa n - 1 for n = 1..horizon), summed over
/// every claim sequence. Only for finite tables.
inline double enumerate_survival(const seasonal_ruin::RiskModel& model, long u, long horizon) {
  struct Walker {
    const seasonal_ruin::RiskModel& model;
    long u;
    long horizon;
    double operator()(long n, long claims, double weight) const {
      if (n > horizon) return weight;
      const auto& p = model.claim(n).probs();
      double acc = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        const long total = claims + static_cast<long>(i);
        if (total > u + model.kappa * n - 1) continue;
        acc += (*this)(n + 1, total, weight * p[i]);
      }
      return acc;
    }
  };
  return Walker{model, u, horizon}(1, 0, 1.0);
}

/// Random model of finite tables with support length <= max_len; the net
/// profit condition is not imposed.
inline seasonal_ruin::RiskModel small_model(std::mt19937_64& rng, long kappa_max, long n_max, long max_len) {
  std::uniform_int_distribution<long> kd(1, kappa_max), nd(1, n_max);
  const long kappa = kd(rng);
  const long n = nd(rng);
  std::vector<seasonal_ruin::DiscreteDist> seasons;
  for (long k = 0; k < n; ++k) seasons.push_back(seasonal_ruin::random_table(rng, max_len));
  return seasonal_ruin::RiskModel(kappa, std::move(seasons));
}

}  // namespace testing_support
