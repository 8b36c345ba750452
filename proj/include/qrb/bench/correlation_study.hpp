#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qrb/bench/scenario.hpp"
#include "qrb/core/random.hpp"
#include "qrb/metrics/baseline.hpp"
#include "qrb/metrics/correlation.hpp"
#include "qrb/noise/channel.hpp"
#include "qrb/tomo/qdt.hpp"

namespace qrb {

/// Relative readout amplitude -> assignment fidelity profile, realized
/// as per-qubit depolarizing strength k = 2 (1 - F). The default
/// anchors are F(1.0) = 0.95 and F(0.1) = 0.55; values in between are
/// interpolated linearly, outside they are clamped.
struct AmplitudeMap {
  std::vector<double> amplitudes = {0.1, 1.0};
  std::vector<double> fidelities = {0.55, 0.95};

  void validate() const {
    if (amplitudes.size() != fidelities.size() || amplitudes.size() < 2)
      throw std::invalid_argument("AmplitudeMap: need matching amplitude/fidelity lists of length >= 2");
    for (std::size_t i = 1; i < amplitudes.size(); ++i)
      if (amplitudes[i] <= amplitudes[i - 1]) throw std::invalid_argument("AmplitudeMap: amplitudes must increase");
    for (double f : fidelities)
      if (f < 0.5 || f > 1.0) throw std::invalid_argument("AmplitudeMap: fidelities must lie in [0.5, 1]");
  }

  double fidelity_at(double amplitude) const {
    if (amplitude <= amplitudes.front()) return fidelities.front();
    if (amplitude >= amplitudes.back()) return fidelities.back();
    for (std::size_t i = 1; i < amplitudes.size(); ++i)
      if (amplitude <= amplitudes[i]) {
        const double t = (amplitude - amplitudes[i - 1]) / (amplitudes[i] - amplitudes[i - 1]);
        return fidelities[i - 1] + t * (fidelities[i] - fidelities[i - 1]);
      }
    return fidelities.back();
  }

  /// Depolarizing strength reproducing the profile's assignment
  /// fidelity: F = 1 - k/2 under per-qubit depolarizing readout noise.
  double k_at(double amplitude) const {
    return std::clamp(2.0 * (1.0 - fidelity_at(amplitude)), 0.0, 1.0);
  }
};

struct CorrelationStudyPoint {
  long long shots = 0;  // total detector-tomography shots
  double amplitude = 1.0;
  double c01_classical = 0.0, c10_classical = 0.0, sym_classical = 0.0;
  double c01_quantum = 0.0, c10_quantum = 0.0, sym_quantum = 0.0;
};

struct CorrelationStudyResult {
  std::vector<double> amplitudes;                 // grid ({1.0} when absent)
  std::vector<CorrelationStudyPoint> points;      // per (amplitude, shots)
  std::vector<CorrelationStudyPoint> exact;       // exact-statistics value per amplitude
  std::vector<BaselineBand> bands;                // matched baseline per amplitude
};

namespace detail {

inline CorrelationStudyPoint coefficients_of(const Povm& m, long long shots, double amplitude) {
  CorrelationStudyPoint p;
  p.shots = shots;
  p.amplitude = amplitude;
  p.c01_classical = correlation_coefficient(m, 0, 1, CorrelationMode::kClassical);
  p.c10_classical = correlation_coefficient(m, 1, 0, CorrelationMode::kClassical);
  p.sym_classical = 0.5 * (p.c01_classical + p.c10_classical);
  p.c01_quantum = correlation_coefficient(m, 0, 1, CorrelationMode::kQuantum);
  p.c10_quantum = correlation_coefficient(m, 1, 0, CorrelationMode::kQuantum);
  p.sym_quantum = 0.5 * (p.c01_quantum + p.c10_quantum);
  return p;
}

}  // namespace detail

/// Correlation coefficients of detector-tomography reconstructions of
/// the two-qubit computational readout POVM as a function of the shot
/// budget, optionally swept over relative readout amplitudes
/// (per-qubit depolarizing strength from the amplitude map), each
/// with a matched uncorrelated baseline band.
///
/// readout_channel shapes the true readout POVM (applied to the ZZ
/// projectors); baseline_channel is its correlation-free counterpart
/// applied to the single-qubit Z projectors of each qubit.
inline CorrelationStudyResult correlation_study(const NoiseChannel& readout_channel,
                                                const NoiseChannel& baseline_channel,
                                                const std::vector<long long>& shot_grid,
                                                const std::vector<double>& amplitude_grid,
                                                const AmplitudeMap& map, int baseline_trials,
                                                const QdtConfig& qdt_cfg, const RandomSource& rng) {
  if (shot_grid.empty()) throw std::invalid_argument("correlation_study: empty shot grid");
  for (std::size_t i = 1; i < shot_grid.size(); ++i)
    if (shot_grid[i] <= shot_grid[i - 1]) throw std::invalid_argument("correlation_study: shot grid must increase");
  map.validate();

  CorrelationStudyResult result;
  result.amplitudes = amplitude_grid.empty() ? std::vector<double>{1.0} : amplitude_grid;

  const Povm zz = projective_povm(MeasurementSetting::parse("ZZ"));
  const Povm z1 = projective_povm(MeasurementSetting::parse("Z"));
  const auto calib = tetrahedron_densities(2);
  const auto tags = tetrahedron_tags(2);

  for (std::size_t ai = 0; ai < result.amplitudes.size(); ++ai) {
    const double amplitude = result.amplitudes[ai];
    const double k = amplitude_grid.empty() ? 0.0 : map.k_at(amplitude);

    Povm readout = apply_noise(zz, readout_channel);
    Povm baseline_single = apply_noise(z1, baseline_channel);
    if (k > 0.0) {
      readout = apply_noise(readout, make_channel(Depolarizing(k, {0, 1})));
      baseline_single = apply_noise(baseline_single, make_channel(Depolarizing(k, {0})));
    }

    result.exact.push_back(detail::coefficients_of(readout, 0, amplitude));

    for (std::size_t g = 0; g < shot_grid.size(); ++g) {
      const long long per_cell = shot_grid[g] / static_cast<long long>(calib.size());
      if (per_cell < 1) throw std::invalid_argument("correlation_study: fewer shots than calibration cells");
      const ShotCounts counts = sample_counts(calib, tags, {readout}, {"readout"}, per_cell,
                                              rng.derive(20).derive(ai).derive(g));
      const Povm estimate = qdt_mle(counts, 0, calib, qdt_cfg).povm;
      result.points.push_back(detail::coefficients_of(estimate, shot_grid[g], amplitude));
    }

    result.bands.push_back(uncorrelated_baseline({baseline_single, baseline_single}, shot_grid, baseline_trials,
                                                 qdt_cfg, rng.derive(21).derive(ai)));
  }
  return result;
}

}  // namespace qrb
