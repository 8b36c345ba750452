#pragma once

#include <stdexcept>
#include <vector>

#include "qrb/bench/scenario.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "qrb/tomo/bootstrap.hpp"
#include "qrb/tomo/qdt.hpp"
#include "qrb/tomo/qst.hpp"

namespace qrb {

/// One shots-per-basis point of the mitigated-vs-standard comparison.
struct QremPoint {
  long long shots_per_basis = 0;
  double infidelity_qrem = 0.0;
  double infidelity_standard = 0.0;
  double bootstrap_std_qrem = 0.0;
  double bootstrap_std_standard = 0.0;
};

struct QremComparison {
  std::vector<QremPoint> points;
  long long qdt_shots_per_cell = 0;
  long long qdt_total_shots = 0;
};

/// Reconstructs one fixed target at increasing shots per basis, with
/// the detector estimate (mitigated) and with ideal projectors
/// (standard); bootstrap stds resample the state-tomography counts
/// under the fixed POVM estimate.
inline QremComparison qrem_comparison(const ReadoutScenario& sc, const PureState& target,
                                      const std::vector<long long>& shots_per_basis_schedule,
                                      long long qdt_shots_per_cell, const QdtConfig& qdt_cfg,
                                      const QstConfig& qst_cfg, const BootstrapConfig& boot_cfg,
                                      const RandomSource& rng) {
  if (shots_per_basis_schedule.empty()) throw std::invalid_argument("qrem_comparison: empty schedule");
  for (std::size_t k = 1; k < shots_per_basis_schedule.size(); ++k)
    if (shots_per_basis_schedule[k] <= shots_per_basis_schedule[k - 1])
      throw std::invalid_argument("qrem_comparison: schedule must be strictly increasing");
  if (target.dim() != sc.ideal.front().dim()) throw std::invalid_argument("qrem_comparison: target dimension mismatch");

  QremComparison result;
  result.qdt_shots_per_cell = qdt_shots_per_cell;
  const DetectorEstimate detector = estimate_detector(sc, qdt_shots_per_cell, qdt_cfg, rng.derive(10));
  result.qdt_total_shots = detector.total_shots;

  const DensityMatrix rho = density_of(target);
  std::vector<std::vector<double>> probs;
  for (const auto& m : sc.noisy) probs.push_back(born_probabilities(rho, m));

  ShotCounts counts;
  counts.settings = sc.setting_labels;
  counts.states = {"target"};
  counts.outcomes = sc.noisy.front().outcome_labels();
  counts.counts.assign(sc.noisy.size(), {std::vector<long long>(counts.outcomes.size(), 0)});
  std::vector<RandomSource> streams;
  for (std::size_t b = 0; b < sc.noisy.size(); ++b) streams.push_back(rng.derive(11).derive(b));

  long long drawn = 0;
  for (std::size_t k = 0; k < shots_per_basis_schedule.size(); ++k) {
    const long long per_basis = shots_per_basis_schedule[k];
    const long long delta = per_basis - drawn;
    for (std::size_t b = 0; b < sc.noisy.size(); ++b) {
      const auto extra = streams[b].multinomial(delta, probs[b]);
      for (std::size_t i = 0; i < extra.size(); ++i) counts.counts[b][0][i] += extra[i];
    }
    drawn = per_basis;

    QremPoint point;
    point.shots_per_basis = per_basis;
    point.infidelity_qrem = pure_infidelity(qst_mle(counts, detector.povms, qst_cfg).rho, target);
    point.infidelity_standard = pure_infidelity(qst_mle(counts, sc.ideal, qst_cfg).rho, target);

    auto stat = [&](const DensityMatrix& est) { return pure_infidelity(est, target); };
    BootstrapConfig bc = boot_cfg;
    bc.seed = rng.derive(12).derive(k).seed();
    point.bootstrap_std_qrem = bootstrap_std(
        counts, [&](const ShotCounts& c) { return qst_mle(c, detector.povms, qst_cfg).rho; }, stat, bc);
    bc.seed = rng.derive(13).derive(k).seed();
    point.bootstrap_std_standard = bootstrap_std(
        counts, [&](const ShotCounts& c) { return qst_mle(c, sc.ideal, qst_cfg).rho; }, stat, bc);
    result.points.push_back(point);
  }
  return result;
}

/// (|0...0> + |1...1>)/sqrt(2): the fixed multi-qubit target used by
/// the three-qubit comparison study.
inline PureState ghz_state(int n_qubits) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Vec amp = Vec::Zero(dim);
  amp(0) = 1.0 / std::sqrt(2.0);
  amp(dim - 1) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(amp));
}

}  // namespace qrb
