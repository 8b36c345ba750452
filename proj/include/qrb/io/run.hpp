#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrb/bench/budget.hpp"
#include "qrb/bench/correlation_study.hpp"
#include "qrb/bench/infidelity.hpp"
#include "qrb/bench/qrem.hpp"
#include "qrb/bench/scenario.hpp"
#include "qrb/io/config.hpp"
#include "qrb/io/csv.hpp"
#include "qrb/io/manifest.hpp"
#include "qrb/io/serialize.hpp"
#include "qrb/metrics/coherent.hpp"

namespace qrb {

struct RunOptions {
  std::optional<std::uint64_t> seed;     // overrides the config seed
  std::optional<std::string> out_dir;   // overrides the config directory
  int threads = 1;
};

namespace run_detail {

namespace fs = std::filesystem;

/// Collects a study's output files, then writes the manifest last.
class StudyWriter {
 public:
  StudyWriter(const fs::path& dir, const ExperimentConfig& cfg, std::uint64_t seed) : dir_(dir) {
    fs::create_directories(dir_);
    manifest_.config_echo = config_to_json(cfg);
    manifest_.config_echo["seed"] = seed;
    manifest_.seed = seed;
    manifest_.started_at = iso8601_now();
  }

  void add_json(const std::string& name, const nlohmann::json& j) { add_file(name, j.dump(2) + "\n"); }

  void add_csv(const std::string& name, const CsvSchema& schema, const std::vector<CsvRow>& rows) {
    add_file(name, emit_csv(schema, rows));
  }

  RunManifest finish() {
    manifest_.finished_at = iso8601_now();
    write_file_atomic(dir_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
    return manifest_;
  }

 private:
  void add_file(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    manifest_.files.push_back(ManifestFile{name, content.size(), fnv1a_hex(content)});
  }

  fs::path dir_;
  RunManifest manifest_;
};

inline long long qdt_shots_per_cell(const ExperimentConfig& cfg, const ReadoutScenario& sc) {
  if (!cfg.qdt.total_shots) return cfg.qdt.shots_per_cell;
  long long cells = static_cast<long long>(sc.settings.size());
  long long n_states = 1;
  for (int q = 0; q < sc.n_qubits; ++q) n_states *= 4;
  cells *= n_states;
  const long long per_cell = *cfg.qdt.total_shots / cells;
  if (per_cell < 1)
    throw std::runtime_error("qdt.total_shots leaves empty calibration cells (" + std::to_string(cells) + " cells)");
  return per_cell;
}

inline std::vector<PureState> make_targets(int n_qubits, int count, const RandomSource& rng) {
  RandomSource source = rng.derive(100);
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(haar_random_product_state(n_qubits, source));
  return out;
}

inline nlohmann::json detector_to_json(const ReadoutScenario& sc, const DetectorEstimate& est) {
  nlohmann::json j;
  for (std::size_t b = 0; b < sc.setting_labels.size(); ++b) {
    nlohmann::json entry;
    entry["setting"] = sc.setting_labels[b];
    entry["estimated"] = povm_to_json(est.povms[b]);
    entry["true"] = povm_to_json(sc.noisy[b]);
    entry["d_av_to_truth"] = average_case_distance(est.povms[b], sc.noisy[b]);
    j.push_back(std::move(entry));
  }
  return j;
}

inline std::vector<CsvRow> curve_rows(const InfidelityCurve& curve) {
  std::vector<CsvRow> rows;
  for (std::size_t k = 0; k < curve.shots.size(); ++k)
    rows.push_back({curve.shots[k], curve.mean[k], curve.q25[k], curve.q75[k], curve.estimator});
  return rows;
}

inline const CsvSchema kCurveSchema{{"shots", "mean", "q25", "q75", "estimator"}};
inline const CsvSchema kBandSchema{{"shots", "mode", "mean", "std"}};

inline std::vector<CsvRow> band_rows(const BaselineBand& band) {
  std::vector<CsvRow> rows;
  for (std::size_t g = 0; g < band.shot_grid.size(); ++g)
    rows.push_back({band.shot_grid[g], std::string("classical"), band.mean_classical[g], band.std_classical[g]});
  for (std::size_t g = 0; g < band.shot_grid.size(); ++g)
    rows.push_back({band.shot_grid[g], std::string("quantum"), band.mean_quantum[g], band.std_quantum[g]});
  return rows;
}

inline nlohmann::json band_to_json(const BaselineBand& band) {
  nlohmann::json j;
  j["shot_grid"] = band.shot_grid;
  j["mean_classical"] = band.mean_classical;
  j["std_classical"] = band.std_classical;
  j["mean_quantum"] = band.mean_quantum;
  j["std_quantum"] = band.std_quantum;
  j["n_trials"] = band.n_trials;
  return j;
}

inline nlohmann::json curve_to_json(const InfidelityCurve& curve) {
  nlohmann::json j;
  j["shots"] = curve.shots;
  j["mean"] = curve.mean;
  j["q25"] = curve.q25;
  j["q75"] = curve.q75;
  j["n_ok"] = curve.n_ok;
  j["n_states"] = curve.n_states;
  j["estimator"] = curve.estimator;
  j["per_target"] = curve.per_target;
  return j;
}

// ---------------------------------------------------------------- studies

inline void run_qdt_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer) {
  const auto sc = make_scenario(cfg.n_qubits, build_channel(cfg.noise, cfg.n_qubits));
  const RandomSource rng(seed);
  const long long per_cell = qdt_shots_per_cell(cfg, sc);
  const auto est = estimate_detector(sc, per_cell, cfg.qdt_config(), rng.derive(1));

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["shots_per_cell"] = per_cell;
  archive["total_shots"] = est.total_shots;
  archive["detectors"] = detector_to_json(sc, est);
  archive["counts"] = counts_to_json(est.counts);
  writer.add_json("archive.json", archive);

  std::vector<CsvRow> rows;
  for (std::size_t b = 0; b < sc.setting_labels.size(); ++b)
    rows.push_back({std::string(sc.setting_labels[b]), average_case_distance(est.povms[b], sc.noisy[b]),
                    coherent_error(est.povms[b]).epsilon_coh, coherent_error(sc.noisy[b]).epsilon_coh});
  writer.add_csv("qdt_metrics.csv", CsvSchema{{"setting", "d_av", "eps_coh_estimate", "eps_coh_true"}}, rows);
}

inline void run_qst_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer) {
  const auto sc = make_scenario(cfg.n_qubits, build_channel(cfg.noise, cfg.n_qubits));
  const RandomSource rng(seed);
  const auto est = estimate_detector(sc, qdt_shots_per_cell(cfg, sc), cfg.qdt_config(), rng.derive(1));
  const auto targets = make_targets(cfg.n_qubits, cfg.qst_study.n_targets, rng);
  const QstConfig qst_cfg = cfg.qst_config();

  nlohmann::json results = nlohmann::json::array();
  std::vector<CsvRow> rows;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const ShotCounts counts = sample_counts(std::vector<PureState>{targets[t]}, {"target"}, sc.noisy,
                                            sc.setting_labels, cfg.qst_study.shots_per_setting, rng.derive(2).derive(t));
    auto reconstruct = [&](const std::vector<Povm>& povms, std::uint64_t stream) {
      if (qst_cfg.estimator == Estimator::kBme) return qst_bme(counts, povms, qst_cfg, rng.derive(stream).derive(t));
      return qst_mle(counts, povms, qst_cfg);
    };
    const QstResult mitigated = reconstruct(est.povms, 3);
    const QstResult standard = reconstruct(sc.ideal, 4);
    const double inf_m = pure_infidelity(mitigated.rho, targets[t]);
    const double inf_s = pure_infidelity(standard.rho, targets[t]);
    rows.push_back({static_cast<long long>(t), inf_m, inf_s});

    nlohmann::json r;
    r["target"] = pure_state_to_json(targets[t]);
    r["rho_mitigated"] = matrix_to_json(mitigated.rho.matrix());
    r["rho_standard"] = matrix_to_json(standard.rho.matrix());
    r["infidelity_mitigated"] = inf_m;
    r["infidelity_standard"] = inf_s;
    r["iterations"] = mitigated.iterations;
    r["log_likelihood"] = mitigated.log_likelihood;
    results.push_back(std::move(r));
  }

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["detectors"] = detector_to_json(sc, est);
  archive["results"] = std::move(results);
  writer.add_json("archive.json", archive);
  writer.add_csv("qst_results.csv", CsvSchema{{"target", "infidelity_mitigated", "infidelity_standard"}}, rows);
}

inline void run_threshold_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer,
                                int threads) {
  const auto sc = make_scenario(cfg.n_qubits, build_channel(cfg.noise, cfg.n_qubits));
  const RandomSource rng(seed);
  const auto est = estimate_detector(sc, qdt_shots_per_cell(cfg, sc), cfg.qdt_config(), rng.derive(1));
  const auto targets = make_targets(cfg.n_qubits, cfg.threshold.n_targets, rng);
  const auto schedule = log_schedule(cfg.threshold.shots_min, cfg.threshold.shots_max,
                                     cfg.threshold.points_per_decade);
  const QstConfig qst_cfg = cfg.qst_config();

  const auto qrem = infidelity_curve(targets, sc.noisy, est.povms, schedule, qst_cfg, rng.derive(2), false, threads);
  const auto standard = infidelity_curve(targets, sc.noisy, sc.ideal, schedule, qst_cfg, rng.derive(2), false, threads);

  writer.add_csv("curve_qrem.csv", kCurveSchema, curve_rows(qrem));
  writer.add_csv("curve_standard.csv", kCurveSchema, curve_rows(standard));

  nlohmann::json crossings_json = nlohmann::json::array();
  std::vector<CsvRow> crossing_rows;
  for (const auto& [mode, curve] : {std::pair<std::string, const InfidelityCurve&>{"qrem", qrem},
                                    {"standard", standard}}) {
    for (double th : cfg.threshold.thresholds) {
      nlohmann::json cj;
      cj["mode"] = mode;
      cj["threshold"] = th;
      try {
        ThresholdCrossing cross = threshold_crossing(curve, th);
        cross.bootstrap_std = crossing_bootstrap_std(curve, th, cfg.threshold.crossing_resamples, rng.derive(3));
        cj["shots_at_crossing"] = cross.shots_at_crossing;
        cj["bootstrap_std"] = cross.bootstrap_std;
        cj["crossed"] = true;
        crossing_rows.push_back({std::string(mode), th, cross.shots_at_crossing, cross.bootstrap_std,
                                 std::string("yes")});
      } catch (const NoCrossingError&) {
        cj["crossed"] = false;
        crossing_rows.push_back({std::string(mode), th, 0.0, 0.0, std::string("no")});
      }
      crossings_json.push_back(std::move(cj));
    }
  }
  writer.add_csv("crossings.csv", CsvSchema{{"mode", "threshold", "shots_at_crossing", "bootstrap_std", "crossed"}},
                 crossing_rows);

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["detectors"] = detector_to_json(sc, est);
  archive["curve_qrem"] = curve_to_json(qrem);
  archive["curve_standard"] = curve_to_json(standard);
  archive["crossings"] = std::move(crossings_json);
  writer.add_json("archive.json", archive);
}

inline void run_budget_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer, int threads) {
  const auto sc = make_scenario(cfg.n_qubits, build_channel(cfg.noise, cfg.n_qubits));
  const RandomSource rng(seed);
  const auto targets = make_targets(cfg.n_qubits, cfg.budget.n_targets, rng);
  const auto sweep = budget_sweep(cfg.budget.total_budget, cfg.budget.r_grid, targets, sc, cfg.qdt_config(),
                                  cfg.qst_config(), rng.derive(1), threads);

  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < sweep.r_grid.size(); ++i)
    rows.push_back({sweep.r_grid[i], sweep.mean_infidelity[i], sweep.spread[i],
                    static_cast<long long>(sweep.n_ok[i])});
  writer.add_csv("budget_sweep.csv", CsvSchema{{"r", "mean_infidelity", "spread", "n_ok"}}, rows);
  writer.add_csv("budget_baseline.csv", CsvSchema{{"mean_infidelity", "spread"}},
                 {{sweep.baseline_infidelity, sweep.baseline_spread}});

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["total_budget"] = sweep.total_budget;
  archive["r_grid"] = sweep.r_grid;
  archive["mean_infidelity"] = sweep.mean_infidelity;
  archive["spread"] = sweep.spread;
  archive["n_ok"] = sweep.n_ok;
  archive["per_target"] = sweep.per_target;
  archive["baseline_infidelity"] = sweep.baseline_infidelity;
  archive["baseline_spread"] = sweep.baseline_spread;
  writer.add_json("archive.json", archive);
}

inline void run_qrem3_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer) {
  const auto sc = make_scenario(3, build_channel(cfg.noise, 3));
  const RandomSource rng(seed);
  const PureState target = cfg.qrem3.target == "ghz" ? ghz_state(3) : make_targets(3, 1, rng).front();
  BootstrapConfig boot;
  boot.n_resamples = cfg.qrem3.bootstrap_resamples;
  const auto cmp = qrem_comparison(sc, target, cfg.qrem3.shots_per_basis, cfg.qrem3.qdt_shots_per_cell,
                                   cfg.qdt_config(), cfg.qst_config(), boot, rng.derive(1));

  std::vector<CsvRow> points, boots;
  for (const auto& p : cmp.points) {
    points.push_back({p.shots_per_basis, p.infidelity_qrem, p.infidelity_standard,
                      p.infidelity_qrem > 0 ? p.infidelity_standard / p.infidelity_qrem : 0.0});
    boots.push_back({p.shots_per_basis, p.bootstrap_std_qrem, p.bootstrap_std_standard});
  }
  writer.add_csv("qrem3_points.csv",
                 CsvSchema{{"shots_per_basis", "infidelity_qrem", "infidelity_standard", "ratio"}}, points);
  writer.add_csv("qrem3_bootstrap.csv", CsvSchema{{"shots_per_basis", "std_qrem", "std_standard"}}, boots);

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["target"] = pure_state_to_json(target);
  archive["qdt_shots_per_cell"] = cmp.qdt_shots_per_cell;
  archive["qdt_total_shots"] = cmp.qdt_total_shots;
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : cmp.points) {
    nlohmann::json e;
    e["shots_per_basis"] = p.shots_per_basis;
    e["infidelity_qrem"] = p.infidelity_qrem;
    e["infidelity_standard"] = p.infidelity_standard;
    e["bootstrap_std_qrem"] = p.bootstrap_std_qrem;
    e["bootstrap_std_standard"] = p.bootstrap_std_standard;
    pj.push_back(std::move(e));
  }
  archive["points"] = std::move(pj);
  writer.add_json("archive.json", archive);
}

inline std::vector<CsvRow> correlation_rows(const std::vector<CorrelationStudyPoint>& points) {
  std::vector<CsvRow> rows;
  for (const auto& p : points) {
    rows.push_back({p.shots, p.amplitude, std::string("classical"), p.c01_classical, p.c10_classical,
                    p.sym_classical});
    rows.push_back({p.shots, p.amplitude, std::string("quantum"), p.c01_quantum, p.c10_quantum, p.sym_quantum});
  }
  return rows;
}

inline const CsvSchema kCorrelationSchema{{"shots", "amplitude", "mode", "c_0to1", "c_1to0", "symmetric"}};

inline nlohmann::json correlation_point_json(const CorrelationStudyPoint& p) {
  nlohmann::json j;
  j["shots"] = p.shots;
  j["amplitude"] = p.amplitude;
  j["c01_classical"] = p.c01_classical;
  j["c10_classical"] = p.c10_classical;
  j["sym_classical"] = p.sym_classical;
  j["c01_quantum"] = p.c01_quantum;
  j["c10_quantum"] = p.c10_quantum;
  j["sym_quantum"] = p.sym_quantum;
  return j;
}

inline void run_correlation_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer) {
  const RandomSource rng(seed);
  const NoiseChannel readout = build_channel(cfg.noise, 2);
  const NoiseChannel baseline = build_channel(cfg.correlation.baseline_channels, 1);
  const auto res = correlation_study(readout, baseline, cfg.correlation.shot_grid, cfg.correlation.amplitudes,
                                     cfg.correlation.amplitude_map, cfg.correlation.baseline_trials,
                                     cfg.qdt_config(), rng.derive(1));

  writer.add_csv("correlation.csv", kCorrelationSchema, correlation_rows(res.points));
  writer.add_csv("correlation_exact.csv", kCorrelationSchema, correlation_rows(res.exact));
  for (std::size_t ai = 0; ai < res.bands.size(); ++ai) {
    const std::string name = res.bands.size() == 1 ? "baseline_band.csv" : "baseline_band_a" + std::to_string(ai) + ".csv";
    writer.add_csv(name, kBandSchema, band_rows(res.bands[ai]));
  }

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["amplitudes"] = res.amplitudes;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : res.points) points.push_back(correlation_point_json(p));
  archive["points"] = std::move(points);
  nlohmann::json exact = nlohmann::json::array();
  for (const auto& p : res.exact) exact.push_back(correlation_point_json(p));
  archive["exact"] = std::move(exact);
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : res.bands) bands.push_back(band_to_json(b));
  archive["bands"] = std::move(bands);
  writer.add_json("archive.json", archive);
}

inline void run_baseline_study(const ExperimentConfig& cfg, std::uint64_t seed, StudyWriter& writer) {
  const RandomSource rng(seed);
  const NoiseChannel single_noise = build_channel(cfg.baseline.channels, 1);
  const Povm single = apply_noise(projective_povm(MeasurementSetting::parse("Z")), single_noise);
  const BaselineBand band = uncorrelated_baseline({single, single}, cfg.baseline.shot_grid, cfg.baseline.n_trials,
                                                  cfg.qdt_config(), rng.derive(1));
  writer.add_csv("baseline_band.csv", kBandSchema, band_rows(band));

  nlohmann::json archive;
  archive["config"] = config_to_json(cfg);
  archive["seed"] = seed;
  archive["band"] = band_to_json(band);
  archive["single_qubit_povm"] = povm_to_json(single);
  writer.add_json("archive.json", archive);
}

}  // namespace run_detail

/// Executes the configured study, writes the JSON archive, the CSV
/// outputs and a manifest (archive contents are deterministic in
/// (config, seed); timestamps live only in the manifest).
inline RunManifest run_study(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  const std::string out_dir = opts.out_dir.value_or(cfg.out_dir);
  run_detail::StudyWriter writer(out_dir, cfg, seed);
  switch (cfg.kind) {
    case StudyKind::kQdt: run_detail::run_qdt_study(cfg, seed, writer); break;
    case StudyKind::kQst: run_detail::run_qst_study(cfg, seed, writer); break;
    case StudyKind::kThreshold: run_detail::run_threshold_study(cfg, seed, writer, opts.threads); break;
    case StudyKind::kBudget: run_detail::run_budget_study(cfg, seed, writer, opts.threads); break;
    case StudyKind::kQrem3: run_detail::run_qrem3_study(cfg, seed, writer); break;
    case StudyKind::kCorrelation: run_detail::run_correlation_study(cfg, seed, writer); break;
    case StudyKind::kBaseline: run_detail::run_baseline_study(cfg, seed, writer); break;
  }
  return writer.finish();
}

}  // namespace qrb
