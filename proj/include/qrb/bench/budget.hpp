#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qrb/bench/scenario.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "qrb/detail/parallel.hpp"
#include "qrb/tomo/qdt.hpp"
#include "qrb/tomo/qst.hpp"

namespace qrb {

enum class RatioAssumption { kIc, kMixed, kPure };

inline std::string ratio_assumption_name(RatioAssumption a) {
  switch (a) {
    case RatioAssumption::kIc: return "ic";
    case RatioAssumption::kMixed: return "mixed";
    default: return "pure";
  }
}

struct RatioPrediction {
  int n_qubits = 0;
  long long n_states = 0;
  RatioAssumption assumption = RatioAssumption::kIc;
  double r = 0.0;
};

/// Parameter-counting predictions for the optimal detector-tomography
/// shot fraction:
///   IC POVM:            r = 4^n / (4^n + N_s)
///   mixed targets:      r = 2^n / (2^n + N_s)
///   pure targets:       r = (4^n + 2^n) / (4^n + 2^n + 2 N_s)
inline RatioPrediction theoretical_ratio(int n_qubits, long long n_states, RatioAssumption assumption) {
  if (n_qubits < 1) throw std::invalid_argument("theoretical_ratio: n_qubits must be >= 1");
  if (n_states < 1) throw std::invalid_argument("theoretical_ratio: n_states must be >= 1");
  const double four_n = std::pow(4.0, n_qubits);
  const double two_n = std::pow(2.0, n_qubits);
  const auto ns = static_cast<double>(n_states);
  double r = 0.0;
  switch (assumption) {
    case RatioAssumption::kIc: r = four_n / (four_n + ns); break;
    case RatioAssumption::kMixed: r = two_n / (two_n + ns); break;
    case RatioAssumption::kPure: r = (four_n + two_n) / (four_n + two_n + 2.0 * ns); break;
  }
  return RatioPrediction{n_qubits, n_states, assumption, r};
}

/// Final infidelities over a grid of detector/state shot splittings of
/// one fixed budget, averaged over target states.
struct BudgetSweepResult {
  long long total_budget = 0;
  std::vector<double> r_grid;
  std::vector<double> mean_infidelity;
  std::vector<double> spread;  // std across targets
  std::vector<int> n_ok;
  // per_target[r][t]; NaN marks a failed reconstruction.
  std::vector<std::vector<double>> per_target;
  double baseline_infidelity = 0.0;  // full budget on standard QST
  double baseline_spread = 0.0;
};

namespace detail {

struct MeanStd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  int n_ok = 0;
};

inline MeanStd mean_std_skip_nan(const std::vector<double>& v) {
  MeanStd out;
  double sum = 0.0;
  for (double x : v)
    if (!std::isnan(x)) {
      sum += x;
      ++out.n_ok;
    }
  if (out.n_ok == 0) return out;
  out.mean = sum / out.n_ok;
  if (out.n_ok > 1) {
    double var = 0.0;
    for (double x : v)
      if (!std::isnan(x)) var += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(var / (out.n_ok - 1));
  } else {
    out.sd = 0.0;
  }
  return out;
}

}  // namespace detail

inline BudgetSweepResult budget_sweep(long long total_budget, const std::vector<double>& r_grid,
                                      const std::vector<PureState>& targets, const ReadoutScenario& sc,
                                      const QdtConfig& qdt_cfg, const QstConfig& qst_cfg,
                                      const RandomSource& rng, int threads = 1) {
  if (total_budget < 100) throw std::invalid_argument("budget_sweep: budget must be >= 100");
  if (targets.empty()) throw std::invalid_argument("budget_sweep: no targets");
  if (r_grid.empty()) throw std::invalid_argument("budget_sweep: empty r grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (r_grid[i] < 0.0 || r_grid[i] >= 1.0) throw std::invalid_argument("budget_sweep: r must lie in [0, 1)");
    if (i > 0 && r_grid[i] <= r_grid[i - 1]) throw std::invalid_argument("budget_sweep: r grid must be strictly increasing");
  }

  const auto n_settings = static_cast<long long>(sc.settings.size());
  long long n_calib = 1;
  for (int q = 0; q < sc.n_qubits; ++q) n_calib *= 4;

  // Every grid point must leave at least one shot in each calibration
  // and state-tomography cell.
  for (double r : r_grid) {
    const auto qdt_total = static_cast<long long>(std::llround(r * static_cast<double>(total_budget)));
    if (r > 0.0 && qdt_total / (n_settings * n_calib) < 1)
      throw std::invalid_argument("budget_sweep: budget leaves empty calibration cells at r = " + std::to_string(r));
    if ((total_budget - qdt_total) / n_settings < 1)
      throw std::invalid_argument("budget_sweep: budget leaves empty state-tomography cells at r = " + std::to_string(r));
  }

  BudgetSweepResult result;
  result.total_budget = total_budget;
  result.r_grid = r_grid;

  // Standard-QST reconstruction of one target with `shots` spread over
  // the settings; seeds depend only on (target, setting) so equal shot
  // counts reproduce identical data regardless of r.
  auto run_qst = [&](std::size_t t, long long shots, const std::vector<Povm>& recon) {
    const long long per_setting = shots / n_settings;
    if (per_setting < 1) throw std::invalid_argument("budget_sweep: budget leaves empty state-tomography cells");
    const ShotCounts counts = sample_counts(std::vector<PureState>{targets[t]}, {"target"}, sc.noisy,
                                            sc.setting_labels, per_setting, rng.derive(3).derive(t));
    return qst_mle(counts, recon, qst_cfg).rho;
  };

  // Baseline: the whole budget on standard QST with ideal projectors.
  {
    std::vector<double> inf(targets.size(), std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(targets.size(), threads, [&](std::size_t t) {
      try {
        inf[t] = pure_infidelity(run_qst(t, total_budget, sc.ideal), targets[t]);
      } catch (const std::exception&) {
      }
    });
    const auto stats = detail::mean_std_skip_nan(inf);
    result.baseline_infidelity = stats.mean;
    result.baseline_spread = stats.sd;
  }

  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    const double r = r_grid[ri];
    const auto qdt_total = static_cast<long long>(std::llround(r * static_cast<double>(total_budget)));
    const long long qst_total = total_budget - qdt_total;
    std::vector<double> inf(targets.size(), std::numeric_limits<double>::quiet_NaN());

    detail::parallel_for(targets.size(), threads, [&](std::size_t t) {
      try {
        std::vector<Povm> recon;
        if (qdt_total > 0) {
          const long long per_cell = qdt_total / (n_settings * n_calib);
          recon = estimate_detector(sc, per_cell, qdt_cfg, rng.derive(4).derive(t)).povms;
        } else {
          recon = sc.ideal;
        }
        inf[t] = pure_infidelity(run_qst(t, qst_total, recon), targets[t]);
      } catch (const std::exception&) {
      }
    });

    const auto stats = detail::mean_std_skip_nan(inf);
    result.mean_infidelity.push_back(stats.mean);
    result.spread.push_back(stats.sd);
    result.n_ok.push_back(stats.n_ok);
    result.per_target.push_back(std::move(inf));
  }
  return result;
}

}  // namespace qrb
