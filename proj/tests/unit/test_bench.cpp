#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qrb/bench/budget.hpp"
#include "qrb/bench/correlation_study.hpp"
#include "qrb/bench/infidelity.hpp"
#include "qrb/bench/qrem.hpp"
#include "qrb/bench/scenario.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/channel.hpp"

using namespace qrb;

namespace {

std::vector<PureState> haar_targets(int n_qubits, int count, std::uint64_t seed) {
  std::vector<PureState> out;
  RandomSource rng(seed);
  for (int i = 0; i < count; ++i) out.push_back(haar_random_product_state(n_qubits, rng));
  return out;
}

InfidelityCurve synthetic_curve(std::vector<long long> shots, std::vector<double> mean) {
  InfidelityCurve c;
  c.shots = std::move(shots);
  c.per_target = {mean};
  c.n_states = 1;
  detail::aggregate_curve(c);
  return c;
}

}  // namespace

TEST_CASE("theoretical shot ratios reproduce the closed-form values", "[bench]") {
  auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
  CHECK(round2(theoretical_ratio(1, 1, RatioAssumption::kIc).r) == 0.80);
  CHECK(round2(theoretical_ratio(2, 1, RatioAssumption::kIc).r) == 0.94);
  CHECK(round2(theoretical_ratio(1, 1, RatioAssumption::kMixed).r) == 0.67);
  CHECK(round2(theoretical_ratio(1, 1, RatioAssumption::kPure).r) == 0.75);
  CHECK(round2(theoretical_ratio(2, 1, RatioAssumption::kMixed).r) == 0.80);
  CHECK(round2(theoretical_ratio(2, 1, RatioAssumption::kPure).r) == 0.91);

  // Calibration cost amortizes away over many states.
  CHECK(theoretical_ratio(2, 1000000, RatioAssumption::kIc).r < 1e-4);

  // Ordering holds for every n and N_s.
  for (int n = 1; n <= 4; ++n)
    for (long long ns : {1, 2, 5, 100}) {
      const double ic = theoretical_ratio(n, ns, RatioAssumption::kIc).r;
      const double pure = theoretical_ratio(n, ns, RatioAssumption::kPure).r;
      const double mixed = theoretical_ratio(n, ns, RatioAssumption::kMixed).r;
      CHECK(ic > pure);
      CHECK(pure > mixed);
    }
}

TEST_CASE("threshold crossing: on-grid value, monotonicity, no-crossing", "[bench]") {
  const auto curve = synthetic_curve({100, 1000, 10000}, {0.5, 0.10, 0.01});
  const auto cross = threshold_crossing(curve, 0.10);
  CHECK(cross.shots_at_crossing == Catch::Approx(1000.0).margin(1e-9));

  // Lower thresholds never cross earlier.
  const auto c20 = threshold_crossing(curve, 0.20);
  const auto c15 = threshold_crossing(curve, 0.15);
  const auto c10 = threshold_crossing(curve, 0.10);
  CHECK(c20.shots_at_crossing <= c15.shots_at_crossing);
  CHECK(c15.shots_at_crossing <= c10.shots_at_crossing);

  // Saturating curve never crosses.
  const auto flat = synthetic_curve({100, 1000, 10000}, {0.5, 0.32, 0.30});
  CHECK_THROWS_AS(threshold_crossing(flat, 0.10), NoCrossingError);
  CHECK_THROWS_AS(threshold_crossing(curve, 1.5), std::invalid_argument);

  // First point already below: crossing pinned to the grid start.
  const auto low = synthetic_curve({100, 1000}, {0.05, 0.01});
  CHECK(threshold_crossing(low, 0.10).shots_at_crossing == 100.0);
}

TEST_CASE("log schedule is increasing and spans the requested range", "[bench]") {
  const auto s = log_schedule(100, 100000, 5);
  CHECK(s.front() == 100);
  CHECK(s.back() == 100000);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  CHECK(s.size() == 16);
}

TEST_CASE("infidelity curve reaches the consistency limit on exact frequencies", "[bench][slow]") {
  const auto sc = make_ideal_scenario(1);
  const auto targets = haar_targets(1, 2, 900);
  QstConfig cfg;
  cfg.dilution = 1.0;
  cfg.convergence_tol = 1e-13;
  cfg.max_iterations = 3000000;
  const auto curve = infidelity_curve(targets, sc.noisy, sc.ideal, {1000, 10000}, cfg, RandomSource(1),
                                      /*exact_frequencies=*/true);
  for (double v : curve.mean) CHECK(v <= 1e-6);
}

TEST_CASE("mitigated curves dominate standard curves under coherent noise", "[bench][slow]") {
  const auto sc = make_scenario(1, make_channel(CoherentRotation(uniform_rotation(1, Pauli::kX, 0.25))));
  const auto targets = haar_targets(1, 16, 901);
  const auto schedule = log_schedule(1000, 30000, 3);
  QstConfig cfg;
  cfg.convergence_tol = 1e-9;

  // Mitigated reconstruction here uses exact POVM knowledge; the QDT
  // stage has its own tests.
  const auto qrem = infidelity_curve(targets, sc.noisy, sc.noisy, schedule, cfg, RandomSource(7));
  const auto standard = infidelity_curve(targets, sc.noisy, sc.ideal, schedule, cfg, RandomSource(7));
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    CHECK(qrem.n_ok[k] == 16);
    CHECK(qrem.mean[k] <= standard.mean[k]);
    CHECK(qrem.q25[k] <= qrem.q75[k]);
  }

  // Averaged mitigated curves are monotone nonincreasing up to one
  // grid-point violation from sampling noise.
  int violations = 0;
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (qrem.mean[k] > qrem.mean[k - 1]) ++violations;
  CHECK(violations <= 1);
}

TEST_CASE("crossing bootstrap std is positive and finite on sampled curves", "[bench][slow]") {
  const auto sc = make_scenario(1, make_channel(CoherentRotation(uniform_rotation(1, Pauli::kX, 0.25))));
  const auto targets = haar_targets(1, 8, 902);
  const auto schedule = log_schedule(30, 30000, 4);
  QstConfig cfg;
  cfg.convergence_tol = 1e-9;
  const auto curve = infidelity_curve(targets, sc.noisy, sc.noisy, schedule, cfg, RandomSource(8));
  // Threshold chosen to sit mid-curve so the crossing moves under
  // target resampling.
  const double sd = crossing_bootstrap_std(curve, 0.02, 100, RandomSource(9));
  CHECK(std::isfinite(sd));
  CHECK(sd > 0.0);
}

TEST_CASE("budget sweep: r = 0 reproduces the standard baseline exactly", "[bench][slow]") {
  const auto sc = make_scenario(1, make_channel(Composite{{
                                    make_channel(ConfusionMatrix(symmetric_confusion(1, 0.05))),
                                    make_channel(CoherentRotation(uniform_rotation(1, Pauli::kY, 0.2)))}}));
  const auto targets = haar_targets(1, 10, 903);
  QstConfig qst_cfg;
  qst_cfg.convergence_tol = 1e-9;
  QdtConfig qdt_cfg;
  qdt_cfg.convergence_tol = 1e-9;
  const auto sweep = budget_sweep(9999, {0.0, 0.5, 0.95}, targets, sc, qdt_cfg, qst_cfg, RandomSource(10));
  REQUIRE(sweep.r_grid.size() == 3);
  CHECK(sweep.mean_infidelity[0] == sweep.baseline_infidelity);
  CHECK(sweep.spread[0] == sweep.baseline_spread);

  // Starving state tomography is worse than a balanced split.
  CHECK(sweep.mean_infidelity[2] > sweep.mean_infidelity[1]);
}

TEST_CASE("budget sweep validates its grid and budget", "[bench]") {
  const auto sc = make_ideal_scenario(1);
  const auto targets = haar_targets(1, 2, 904);
  CHECK_THROWS_AS(budget_sweep(50, {0.1}, targets, sc, QdtConfig{}, QstConfig{}, RandomSource(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(budget_sweep(10000, {0.5, 0.5}, targets, sc, QdtConfig{}, QstConfig{}, RandomSource(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(budget_sweep(10000, {1.0}, targets, sc, QdtConfig{}, QstConfig{}, RandomSource(1)),
                  std::invalid_argument);
  // Minimum one shot per calibration cell: r = 0.0001 of 10000 gives
  // 1 shot for 12 cells.
  CHECK_THROWS_AS(budget_sweep(10000, {0.0001}, targets, sc, QdtConfig{}, QstConfig{}, RandomSource(1)),
                  std::invalid_argument);
}

TEST_CASE("qrem comparison on a noise-free scenario shows no mitigation gap", "[bench][slow]") {
  const auto sc = make_ideal_scenario(2);
  const PureState target = ghz_state(2);
  QstConfig qst_cfg;
  qst_cfg.convergence_tol = 1e-9;
  QdtConfig qdt_cfg;
  qdt_cfg.convergence_tol = 1e-9;
  BootstrapConfig boot;
  boot.n_resamples = 40;
  const auto cmp = qrem_comparison(sc, target, {400, 1600}, 500, qdt_cfg, qst_cfg, boot, RandomSource(11));
  REQUIRE(cmp.points.size() == 2);
  for (const auto& p : cmp.points) {
    const double gap = std::abs(p.infidelity_qrem - p.infidelity_standard);
    CHECK(gap <= 2.0 * (p.bootstrap_std_qrem + p.bootstrap_std_standard) + 1e-4);
    CHECK(p.bootstrap_std_qrem >= 0.0);
  }
}

TEST_CASE("amplitude map reproduces the anchored fidelity profile", "[bench]") {
  const AmplitudeMap map;
  CHECK(map.fidelity_at(1.0) == Catch::Approx(0.95));
  CHECK(map.fidelity_at(0.1) == Catch::Approx(0.55));
  CHECK(map.k_at(1.0) == Catch::Approx(0.1));
  CHECK(map.k_at(0.1) == Catch::Approx(0.9));
  // Linear in between, clamped outside.
  CHECK(map.fidelity_at(0.55) == Catch::Approx(0.75));
  CHECK(map.fidelity_at(0.01) == Catch::Approx(0.55));
  CHECK(map.fidelity_at(2.0) == Catch::Approx(0.95));

  AmplitudeMap bad;
  bad.amplitudes = {0.5, 0.1};
  bad.fidelities = {0.9, 0.6};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("correlation study: product readout stays inside the baseline band", "[bench][slow]") {
  const NoiseChannel product_noise = make_channel(ConfusionMatrix(symmetric_confusion(2, 0.03)));
  const NoiseChannel baseline_noise = make_channel(ConfusionMatrix(symmetric_confusion(1, 0.03)));
  QdtConfig cfg;
  cfg.convergence_tol = 1e-8;
  const auto res = correlation_study(product_noise, baseline_noise, {2000, 8000}, {}, AmplitudeMap{}, 15, cfg,
                                     RandomSource(12));
  REQUIRE(res.bands.size() == 1);
  REQUIRE(res.points.size() == 2);
  // Exact product POVM carries no correlations.
  CHECK(res.exact[0].sym_quantum < 1e-6);
  for (std::size_t g = 0; g < res.points.size(); ++g) {
    const auto& p = res.points[g];
    const auto& band = res.bands[0];
    CHECK(p.sym_classical <= band.mean_classical[g] + 3 * band.std_classical[g]);
    CHECK(p.sym_quantum <= band.mean_quantum[g] + 3 * band.std_quantum[g]);
  }
}

TEST_CASE("correlation study: iswap readout settles near the exact coefficient", "[bench][slow]") {
  const NoiseChannel iswap = make_channel(ProbabilisticIswap(0.1, 0, 1));
  const NoiseChannel ideal_baseline = make_channel(Composite{{}});
  QdtConfig cfg;
  cfg.convergence_tol = 1e-8;
  const auto res = correlation_study(iswap, ideal_baseline, {64000}, {}, AmplitudeMap{}, 12, cfg, RandomSource(13));
  CHECK(res.exact[0].sym_quantum == Catch::Approx(0.1).margin(1e-6));
  CHECK(res.points[0].sym_quantum == Catch::Approx(0.1).margin(0.03));
}

TEST_CASE("exact correlation coefficients are nonincreasing in depolarizing strength", "[bench][slow]") {
  const NoiseChannel iswap = make_channel(ProbabilisticIswap(0.2, 0, 1));
  const NoiseChannel ideal_baseline = make_channel(Composite{{}});
  QdtConfig cfg;
  cfg.convergence_tol = 1e-8;
  // Ascending amplitudes map to descending depolarizing strength.
  const auto res = correlation_study(iswap, ideal_baseline, {4000}, {0.1, 0.5, 1.0}, AmplitudeMap{}, 10, cfg,
                                     RandomSource(14));
  REQUIRE(res.exact.size() == 3);
  CHECK(res.exact[0].sym_quantum <= res.exact[1].sym_quantum + 1e-4);
  CHECK(res.exact[1].sym_quantum <= res.exact[2].sym_quantum + 1e-4);
  CHECK(res.exact[0].sym_classical <= res.exact[1].sym_classical + 1e-4);
  CHECK(res.exact[1].sym_classical <= res.exact[2].sym_classical + 1e-4);
}
