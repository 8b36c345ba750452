#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/bench/scenario.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "qrb/detail/parallel.hpp"
#include "qrb/tomo/qst.hpp"

namespace qrb {

/// Mean infidelity with interquartile range as a function of cumulative
/// QST shots, aggregated over target states. Per-target traces are kept
/// for bootstrap resampling.
struct InfidelityCurve {
  std::vector<long long> shots;
  std::vector<double> mean;
  std::vector<double> q25;
  std::vector<double> q75;
  std::vector<int> n_ok;  // targets contributing per point
  int n_states = 0;
  std::string estimator;
  // per_target[t][k]; NaN marks a dropped (failed) reconstruction.
  std::vector<std::vector<double>> per_target;
};

struct ThresholdCrossing {
  double threshold = 0.0;
  double shots_at_crossing = 0.0;
  double bootstrap_std = 0.0;
};

struct NoCrossingError : std::runtime_error {
  explicit NoCrossingError(double threshold)
      : std::runtime_error("infidelity curve never crosses threshold " + std::to_string(threshold)) {}
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

inline void aggregate_curve(InfidelityCurve& curve) {
  const std::size_t n_points = curve.shots.size();
  curve.mean.assign(n_points, std::numeric_limits<double>::quiet_NaN());
  curve.q25.assign(n_points, std::numeric_limits<double>::quiet_NaN());
  curve.q75.assign(n_points, std::numeric_limits<double>::quiet_NaN());
  curve.n_ok.assign(n_points, 0);
  for (std::size_t k = 0; k < n_points; ++k) {
    std::vector<double> ok;
    for (const auto& trace : curve.per_target)
      if (!std::isnan(trace[k])) ok.push_back(trace[k]);
    curve.n_ok[k] = static_cast<int>(ok.size());
    if (ok.empty()) continue;
    double m = 0.0;
    for (double v : ok) m += v;
    curve.mean[k] = m / static_cast<double>(ok.size());
    curve.q25[k] = percentile(ok, 0.25);
    curve.q75[k] = percentile(ok, 0.75);
  }
}

}  // namespace detail

/// Simulates cumulative QST of each target under the true POVMs and
/// reconstructs at every schedule point with the reconstruction POVMs
/// (the detector estimate for mitigated runs, ideal projectors for
/// standard ones). Failed reconstructions are dropped with a flag.
inline InfidelityCurve infidelity_curve(const std::vector<PureState>& targets, const std::vector<Povm>& true_povms,
                                        const std::vector<Povm>& recon_povms,
                                        const std::vector<long long>& schedule, const QstConfig& cfg,
                                        const RandomSource& rng, bool exact_frequencies = false,
                                        int threads = 1) {
  if (targets.empty()) throw std::invalid_argument("infidelity_curve: no target states");
  if (schedule.empty()) throw std::invalid_argument("infidelity_curve: empty schedule");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (schedule[k] <= schedule[k - 1]) throw std::invalid_argument("infidelity_curve: schedule must be strictly increasing");
  if (true_povms.size() != recon_povms.size() || true_povms.empty())
    throw std::invalid_argument("infidelity_curve: POVM lists must match");

  const auto n_settings = static_cast<long long>(true_povms.size());
  InfidelityCurve curve;
  curve.shots = schedule;
  curve.n_states = static_cast<int>(targets.size());
  curve.estimator = estimator_name(cfg.estimator);
  curve.per_target.assign(targets.size(), std::vector<double>(schedule.size(), 0.0));

  // Targets write disjoint per_target slots and derive their own
  // streams, so the result is independent of the thread schedule.
  detail::parallel_for(targets.size(), threads, [&](std::size_t t) {
    const DensityMatrix rho = density_of(targets[t]);
    std::vector<std::vector<double>> probs;
    for (const auto& m : true_povms) probs.push_back(born_probabilities(rho, m));

    ShotCounts counts;
    counts.states = {"target"};
    counts.outcomes = true_povms.front().outcome_labels();
    counts.counts.assign(true_povms.size(), {std::vector<long long>(counts.outcomes.size(), 0)});
    for (std::size_t b = 0; b < true_povms.size(); ++b) counts.settings.push_back("s" + std::to_string(b));

    // Persistent per-setting streams make the counts cumulative: each
    // schedule point extends the previous one's data.
    std::vector<RandomSource> cell_rng;
    for (std::size_t b = 0; b < true_povms.size(); ++b)
      cell_rng.push_back(rng.derive(1).derive(t).derive(b));

    long long drawn_per_setting = 0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      const long long per_setting = schedule[k] / n_settings;
      if (!exact_frequencies) {
        const long long delta = per_setting - drawn_per_setting;
        if (delta > 0) {
          for (std::size_t b = 0; b < true_povms.size(); ++b) {
            const auto extra = cell_rng[b].multinomial(delta, probs[b]);
            for (std::size_t i = 0; i < extra.size(); ++i) counts.counts[b][0][i] += extra[i];
          }
          drawn_per_setting = per_setting;
        }
      }

      try {
        DensityMatrix estimate = [&] {
          if (exact_frequencies) {
            std::vector<std::vector<double>> values = probs;
            for (auto& row : values)
              for (double& v : row) v /= double(n_settings);
            return qst_mle(values, recon_povms, cfg).rho;
          }
          if (cfg.estimator == Estimator::kBme)
            return qst_bme(counts, recon_povms, cfg, rng.derive(2).derive(t).derive(k)).rho;
          return qst_mle(counts, recon_povms, cfg).rho;
        }();
        curve.per_target[t][k] = pure_infidelity(estimate, targets[t]);
      } catch (const std::exception&) {
        curve.per_target[t][k] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });

  detail::aggregate_curve(curve);
  return curve;
}

/// First threshold crossing of the mean curve, interpolated linearly in
/// log-log coordinates between the bracketing schedule points.
inline ThresholdCrossing threshold_crossing(const InfidelityCurve& curve, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0) throw std::invalid_argument("threshold_crossing: threshold must be in (0, 1)");
  for (std::size_t k = 0; k < curve.shots.size(); ++k) {
    if (curve.n_ok[k] == 0 || std::isnan(curve.mean[k])) continue;
    if (curve.mean[k] > threshold) continue;
    if (k == 0) return ThresholdCrossing{threshold, static_cast<double>(curve.shots[0]), 0.0};
    // Bracketing segment: mean[k-1] > threshold >= mean[k].
    const double n0 = std::log(static_cast<double>(curve.shots[k - 1]));
    const double n1 = std::log(static_cast<double>(curve.shots[k]));
    const double i0 = std::log(std::max(curve.mean[k - 1], 1e-12));
    const double i1 = std::log(std::max(curve.mean[k], 1e-12));
    const double frac = (std::log(threshold) - i0) / (i1 - i0);
    return ThresholdCrossing{threshold, std::exp(n0 + frac * (n1 - n0)), 0.0};
  }
  throw NoCrossingError(threshold);
}

/// Bootstrap std of the crossing point under resampling of the target
/// states (the curves themselves are reused, so this is cheap).
inline double crossing_bootstrap_std(const InfidelityCurve& curve, double threshold, int n_resamples,
                                     const RandomSource& rng) {
  if (n_resamples < 2) throw std::invalid_argument("crossing_bootstrap_std: n_resamples must be >= 2");
  const std::size_t n_targets = curve.per_target.size();
  std::vector<double> crossings;
  for (int r = 0; r < n_resamples; ++r) {
    RandomSource res_rng = rng.derive(static_cast<std::uint64_t>(r));
    InfidelityCurve resampled;
    resampled.shots = curve.shots;
    resampled.n_states = curve.n_states;
    for (std::size_t t = 0; t < n_targets; ++t) {
      const auto pick = static_cast<std::size_t>(res_rng.bits() % n_targets);
      resampled.per_target.push_back(curve.per_target[pick]);
    }
    detail::aggregate_curve(resampled);
    try {
      crossings.push_back(threshold_crossing(resampled, threshold).shots_at_crossing);
    } catch (const NoCrossingError&) {
      // Resample saturated above the threshold; skip it.
    }
  }
  if (crossings.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : crossings) mean += v;
  mean /= static_cast<double>(crossings.size());
  double var = 0.0;
  for (double v : crossings) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(crossings.size() - 1));
}

/// Logarithmically spaced shot schedule with a fixed number of points
/// per decade.
inline std::vector<long long> log_schedule(long long min_shots, long long max_shots, int points_per_decade) {
  if (min_shots < 1 || max_shots <= min_shots) throw std::invalid_argument("log_schedule: need 1 <= min < max");
  if (points_per_decade < 1) throw std::invalid_argument("log_schedule: points_per_decade must be >= 1");
  std::vector<long long> schedule;
  const double lmin = std::log10(static_cast<double>(min_shots));
  const double lmax = std::log10(static_cast<double>(max_shots));
  const int n_points = std::max(2, static_cast<int>(std::round((lmax - lmin) * points_per_decade)) + 1);
  for (int i = 0; i < n_points; ++i) {
    const double l = lmin + (lmax - lmin) * i / (n_points - 1);
    const auto shots = static_cast<long long>(std::llround(std::pow(10.0, l)));
    if (schedule.empty() || shots > schedule.back()) schedule.push_back(shots);
  }
  return schedule;
}

}  // namespace qrb
