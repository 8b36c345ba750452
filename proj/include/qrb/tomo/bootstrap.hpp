#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrb/core/random.hpp"
#include "qrb/noise/sampling.hpp"

namespace qrb {

struct BootstrapConfig {
  int n_resamples = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_resamples < 2) throw std::invalid_argument("BootstrapConfig: n_resamples must be >= 2");
  }
};

/// Multinomial resample of every cell at its observed total.
inline ShotCounts resample_counts(const ShotCounts& counts, const RandomSource& rng) {
  ShotCounts out = counts;
  std::size_t cell = 0;
  for (std::size_t b = 0; b < counts.counts.size(); ++b)
    for (std::size_t s = 0; s < counts.counts[b].size(); ++s, ++cell) {
      const long long total = counts.cell_total(b, s);
      if (total == 0) continue;
      std::vector<double> p(counts.n_outcomes());
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<double>(counts.counts[b][s][i]) / static_cast<double>(total);
      RandomSource cell_rng = rng.derive(cell);
      out.counts[b][s] = cell_rng.multinomial(total, p);
    }
  return out;
}

/// Standard deviation of statistic(estimator(resampled counts)) over
/// multinomial resamples of the observed data.
template <class EstimatorFn, class StatisticFn>
double bootstrap_std(const ShotCounts& counts, EstimatorFn&& estimator, StatisticFn&& statistic,
                     const BootstrapConfig& cfg) {
  cfg.validate();
  counts.validate();
  if (counts.total() <= 0) throw std::invalid_argument("bootstrap_std: counts are empty");
  RandomSource rng(cfg.seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.n_resamples));
  for (int r = 0; r < cfg.n_resamples; ++r) {
    const ShotCounts resampled = resample_counts(counts, rng.derive(static_cast<std::uint64_t>(r)));
    try {
      values.push_back(statistic(estimator(resampled)));
    } catch (const std::exception& e) {
      throw std::runtime_error("bootstrap_std: estimator failed on resample " + std::to_string(r) + ": " + e.what());
    }
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size() - 1);
  return std::sqrt(var);
}

}  // namespace qrb
