#pragma once

#include <string>
#include <vector>

#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/channel.hpp"
#include "qrb/noise/sampling.hpp"
#include "qrb/noise/setting.hpp"
#include "qrb/noise/tetrahedron.hpp"
#include "qrb/tomo/qdt.hpp"

namespace qrb {

/// One simulated readout: every Pauli setting's ideal projective POVM
/// and the noisy POVM actually governing outcome statistics. Noise acts
/// on the measurement (Heisenberg picture); state preparation stays
/// ideal.
struct ReadoutScenario {
  int n_qubits = 0;
  std::vector<MeasurementSetting> settings;
  std::vector<std::string> setting_labels;
  std::vector<Povm> ideal;
  std::vector<Povm> noisy;
};

inline ReadoutScenario make_scenario(int n_qubits, const NoiseChannel& channel) {
  ReadoutScenario sc;
  sc.n_qubits = n_qubits;
  sc.settings = all_settings(n_qubits);
  for (const auto& s : sc.settings) {
    sc.setting_labels.push_back(s.str());
    sc.ideal.push_back(projective_povm(s));
    sc.noisy.push_back(apply_noise(sc.ideal.back(), channel));
  }
  return sc;
}

inline ReadoutScenario make_ideal_scenario(int n_qubits) {
  ReadoutScenario sc;
  sc.n_qubits = n_qubits;
  sc.settings = all_settings(n_qubits);
  for (const auto& s : sc.settings) {
    sc.setting_labels.push_back(s.str());
    sc.ideal.push_back(projective_povm(s));
  }
  sc.noisy = sc.ideal;
  return sc;
}

inline std::vector<DensityMatrix> tetrahedron_densities(int n_qubits) {
  std::vector<DensityMatrix> out;
  for (const auto& s : tetrahedron_states(n_qubits)) out.push_back(density_of(s));
  return out;
}

/// Detector-tomography calibration stage: samples tetrahedron-state
/// counts under the scenario's noisy POVMs and fits one POVM per
/// setting.
struct DetectorEstimate {
  std::vector<Povm> povms;
  ShotCounts counts;
  long long shots_per_cell = 0;
  long long total_shots = 0;
  int max_iterations_used = 0;
};

inline DetectorEstimate estimate_detector(const ReadoutScenario& sc, long long shots_per_cell,
                                          const QdtConfig& cfg, const RandomSource& rng) {
  const auto calib = tetrahedron_densities(sc.n_qubits);
  DetectorEstimate est;
  est.shots_per_cell = shots_per_cell;
  est.counts = sample_counts(calib, tetrahedron_tags(sc.n_qubits), sc.noisy, sc.setting_labels,
                             shots_per_cell, rng);
  est.total_shots = est.counts.total();
  for (std::size_t b = 0; b < sc.noisy.size(); ++b) {
    QdtResult fit = qdt_mle(est.counts, b, calib, cfg);
    est.max_iterations_used = std::max(est.max_iterations_used, fit.iterations);
    est.povms.push_back(std::move(fit.povm));
  }
  return est;
}

}  // namespace qrb
