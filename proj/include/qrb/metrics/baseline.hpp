#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/metrics/correlation.hpp"
#include "qrb/noise/sampling.hpp"
#include "qrb/noise/tetrahedron.hpp"
#include "qrb/tomo/qdt.hpp"

namespace qrb {

/// Correlation-coefficient distribution of reconstructions of a
/// correlation-free (product) readout POVM: the silver/gold reference
/// bands.
struct BaselineBand {
  std::vector<long long> shot_grid;
  std::vector<double> mean_classical, std_classical;
  std::vector<double> mean_quantum, std_quantum;
  int n_trials = 0;

  void validate() const {
    for (std::size_t i = 1; i < shot_grid.size(); ++i)
      if (shot_grid[i] <= shot_grid[i - 1]) throw std::invalid_argument("BaselineBand: shot grid must be strictly increasing");
    for (double s : std_classical)
      if (s < 0) throw std::invalid_argument("BaselineBand: negative std");
    for (double s : std_quantum)
      if (s < 0) throw std::invalid_argument("BaselineBand: negative std");
  }
};

/// Simulates detector tomography of the tensor product of the given
/// single-qubit POVMs at each total shot count, n_trials times, and
/// records mean and standard deviation of the correlation coefficients
/// (both directions pooled) per mode.
inline BaselineBand uncorrelated_baseline(const std::vector<Povm>& single_qubit_povms,
                                          const std::vector<long long>& shot_grid, int n_trials,
                                          const QdtConfig& qdt_cfg, const RandomSource& rng) {
  if (single_qubit_povms.size() != 2) throw std::invalid_argument("uncorrelated_baseline: expected one POVM per qubit of a two-qubit system");
  if (shot_grid.empty()) throw std::invalid_argument("uncorrelated_baseline: empty shot grid");
  if (n_trials < 10) throw std::invalid_argument("uncorrelated_baseline: n_trials must be >= 10");
  for (const Povm& p : single_qubit_povms)
    if (p.dim() != 2 || p.n_outcomes() != 2) throw std::invalid_argument("uncorrelated_baseline: POVMs must be single-qubit two-outcome");

  std::vector<Mat> product_effects;
  for (const Mat& a : single_qubit_povms[0].effects())
    for (const Mat& b : single_qubit_povms[1].effects()) product_effects.push_back(tensor_product(a, b));
  const Povm product_povm(std::move(product_effects), bitstring_labels(4, 2));

  const auto tetra = tetrahedron_states(2);
  std::vector<DensityMatrix> calib;
  calib.reserve(tetra.size());
  for (const auto& s : tetra) calib.push_back(density_of(s));
  const auto tags = tetrahedron_tags(2);

  BaselineBand band;
  band.shot_grid = shot_grid;
  band.n_trials = n_trials;

  for (std::size_t g = 0; g < shot_grid.size(); ++g) {
    const long long shots_per_cell = shot_grid[g] / static_cast<long long>(calib.size());
    if (shots_per_cell < 1) throw std::invalid_argument("uncorrelated_baseline: fewer shots than calibration cells");
    std::vector<double> classical, quantum;
    for (int t = 0; t < n_trials; ++t) {
      const RandomSource trial_rng = rng.derive(g).derive(static_cast<std::uint64_t>(t));
      const ShotCounts counts = sample_counts(calib, tags, {product_povm}, {"readout"}, shots_per_cell, trial_rng);
      const Povm estimate = qdt_mle(counts, 0, calib, qdt_cfg).povm;
      for (int affected = 0; affected < 2; ++affected) {
        classical.push_back(correlation_coefficient(estimate, affected, 1 - affected, CorrelationMode::kClassical));
        quantum.push_back(correlation_coefficient(estimate, affected, 1 - affected, CorrelationMode::kQuantum));
      }
    }
    auto stats = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= static_cast<double>(v.size() - 1);
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    const auto [mc, sc] = stats(classical);
    const auto [mq, sq] = stats(quantum);
    band.mean_classical.push_back(mc);
    band.std_classical.push_back(sc);
    band.mean_quantum.push_back(mq);
    band.std_quantum.push_back(sq);
  }
  band.validate();
  return band;
}

}  // namespace qrb
