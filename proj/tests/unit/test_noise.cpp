#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/channel.hpp"
#include "qrb/noise/sampling.hpp"
#include "qrb/noise/setting.hpp"
#include "qrb/noise/tetrahedron.hpp"
#include "support/oracles.hpp"

using namespace qrb;

TEST_CASE("tetrahedron states: first state and counting", "[noise]") {
  const auto single = tetrahedron_states(1);
  REQUIRE(single.size() == 4);
  CHECK(std::abs(single[0].amplitudes()(0) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(single[0].amplitudes()(1)) < 1e-15);

  const auto two = tetrahedron_states(2);
  REQUIRE(two.size() == 16);
  for (const auto& s : two) CHECK(std::abs(s.amplitudes().squaredNorm() - 1.0) < 1e-12);

  CHECK_THROWS_AS(tetrahedron_states(4), std::invalid_argument);
}

TEST_CASE("tetrahedron states: pairwise overlaps are 1/3", "[noise]") {
  // Direct inner-product computation from the stated amplitudes.
  const auto states = tetrahedron_states(1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex ip = (states[i].amplitudes().adjoint() * states[j].amplitudes())(0);
      const double overlap = std::norm(ip);
      if (i == j)
        CHECK(overlap == Catch::Approx(1.0).margin(1e-12));
      else
        CHECK(overlap == Catch::Approx(1.0 / 3.0).margin(1e-12));
    }
}

TEST_CASE("projective povm in the computational and Hadamard bases", "[noise]") {
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(max_abs(Mat(z.effect(0) - p0)) < 1e-15);
  CHECK(max_abs(Mat(z.effect(1) - p1)) < 1e-15);

  const Povm x = projective_povm(MeasurementSetting::parse("X"));
  CHECK(x.effect(0).trace().real() == Catch::Approx(1.0).margin(1e-14));
  CHECK(x.effect(1).trace().real() == Catch::Approx(1.0).margin(1e-14));
  CHECK(max_abs(Mat(x.effect(0) + x.effect(1) - identity(2))) < 1e-14);
  // |+><+| has all entries 1/2.
  CHECK(x.effect(0)(0, 1).real() == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("projective ZZ povm equals tensor products of Z projectors", "[noise]") {
  const Povm zz = projective_povm(MeasurementSetting::parse("ZZ"));
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  REQUIRE(zz.n_outcomes() == 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      // Kronecker by explicit index loops.
      Mat expected = Mat::Zero(4, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              expected(2 * i + k, 2 * j + l) = z.effect(a)(i, j) * z.effect(b)(k, l);
      CHECK(max_abs(Mat(zz.effect(2 * a + b) - expected)) < 1e-14);
    }
}

TEST_CASE("all_settings enumerates 3^n Pauli strings", "[noise]") {
  const auto s1 = all_settings(1);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0].str() == "X");
  CHECK(s1[2].str() == "Z");
  const auto s2 = all_settings(2);
  REQUIRE(s2.size() == 9);
  CHECK(s2[0].str() == "XX");
  CHECK(s2[8].str() == "ZZ");
}

TEST_CASE("depolarizing channel: identity at k=0, twirl at k=1", "[noise]") {
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  const Povm same = apply_noise(z, make_channel(Depolarizing(0.0, {0})));
  for (std::size_t i = 0; i < 2; ++i) CHECK(max_abs(Mat(same.effect(i) - z.effect(i))) < 1e-12);

  const Povm x = projective_povm(MeasurementSetting::parse("X"));
  const Povm full = apply_noise(x, make_channel(Depolarizing(1.0, {0})));
  for (std::size_t i = 0; i < 2; ++i) {
    const Mat expected = x.effect(i).trace() * identity(2) / 2.0;
    CHECK(max_abs(Mat(full.effect(i) - expected)) < 1e-12);
  }
}

TEST_CASE("confusion channel on Z projectors gives the stated diagonals", "[noise]") {
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  const Povm noisy = apply_noise(z, make_channel(ConfusionMatrix(symmetric_confusion(1, 0.05))));
  CHECK(noisy.effect(0)(0, 0).real() == Catch::Approx(0.95).margin(1e-12));
  CHECK(noisy.effect(0)(1, 1).real() == Catch::Approx(0.05).margin(1e-12));
  CHECK(noisy.effect(1)(0, 0).real() == Catch::Approx(0.05).margin(1e-12));
  CHECK(noisy.effect(1)(1, 1).real() == Catch::Approx(0.95).margin(1e-12));
}

TEST_CASE("confusion noise keeps diagonal POVMs exactly diagonal", "[noise]") {
  RandomSource rng(101);
  const Povm zz = projective_povm(MeasurementSetting::parse("ZZ"));
  // Random left-stochastic matrix.
  Eigen::MatrixXd c(4, 4);
  for (int j = 0; j < 4; ++j) {
    double col = 0;
    for (int i = 0; i < 4; ++i) {
      c(i, j) = rng.uniform();
      col += c(i, j);
    }
    for (int i = 0; i < 4; ++i) c(i, j) /= col;
  }
  const Povm noisy = apply_noise(zz, make_channel(ConfusionMatrix(c)));
  for (const Mat& e : noisy.effects())
    for (Eigen::Index r = 0; r < 4; ++r)
      for (Eigen::Index cc = 0; cc < 4; ++cc)
        if (r != cc) CHECK(std::abs(e(r, cc)) == 0.0);
}

TEST_CASE("separable depolarizing equals tensor composition of single-qubit applications", "[noise]") {
  RandomSource rng(103);
  const double k = 0.37;
  const Povm a = oracles::random_povm(2, 2, rng);
  const Povm b = oracles::random_povm(2, 2, rng);
  std::vector<Mat> prod;
  for (const Mat& ea : a.effects())
    for (const Mat& eb : b.effects()) prod.push_back(tensor_product(ea, eb));
  const Povm product(std::move(prod), bitstring_labels(4, 2));

  const Povm both = apply_noise(product, make_channel(Depolarizing(k, {0, 1})));
  const Povm da = apply_noise(a, make_channel(Depolarizing(k, {0})));
  const Povm db = apply_noise(b, make_channel(Depolarizing(k, {0})));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const Mat expected = tensor_product(da.effect(i), db.effect(j));
      CHECK(max_abs(Mat(both.effect(2 * i + j) - expected)) < 1e-10);
    }
}

TEST_CASE("probabilistic iswap composition follows the channel algebra", "[noise]") {
  RandomSource rng(107);
  const Mat u = iswap_unitary();
  const Mat u2 = u * u;
  const double k1 = 0.3, k2 = 0.45;
  const double w = k1 + k2 - 2 * k1 * k2;

  // Full algebra on random two-qubit POVMs.
  for (int rep = 0; rep < 5; ++rep) {
    const Povm m = oracles::random_povm(4, 4, rng);
    const Povm seq = apply_noise(apply_noise(m, make_channel(ProbabilisticIswap(k1, 0, 1))),
                                 make_channel(ProbabilisticIswap(k2, 0, 1)));
    for (std::size_t i = 0; i < 4; ++i) {
      const Mat expected = (1 - k1) * (1 - k2) * m.effect(i) + w * (u * m.effect(i) * u.adjoint()) +
                           k1 * k2 * (u2 * m.effect(i) * u2.adjoint());
      CHECK(max_abs(Mat(seq.effect(i) - expected)) < 1e-12);
    }
  }

  // On effects commuting with iSWAP^2 = Z(x)Z (e.g. diagonal POVMs) the
  // composition collapses to a single mixture of weight k1 + k2 - 2 k1 k2.
  const Povm zz = projective_povm(MeasurementSetting::parse("ZZ"));
  const Povm diag = apply_noise(zz, make_channel(ConfusionMatrix(symmetric_confusion(2, 0.07))));
  const Povm seq = apply_noise(apply_noise(diag, make_channel(ProbabilisticIswap(k1, 0, 1))),
                               make_channel(ProbabilisticIswap(k2, 0, 1)));
  const Povm mix = apply_noise(diag, make_channel(ProbabilisticIswap(w, 0, 1)));
  for (std::size_t i = 0; i < 4; ++i) CHECK(max_abs(Mat(seq.effect(i) - mix.effect(i))) < 1e-12);
}

TEST_CASE("apply_noise output is always a valid POVM", "[noise]") {
  RandomSource rng(109);
  for (int rep = 0; rep < 15; ++rep) {
    const Povm m = oracles::random_povm(4, 4, rng);
    const double k = rng.uniform();
    CHECK_NOTHROW(apply_noise(m, make_channel(Depolarizing(k, {0, 1}))));
    CHECK_NOTHROW(apply_noise(m, make_channel(ProbabilisticIswap(k, 0, 1))));
    CHECK_NOTHROW(apply_noise(m, make_channel(CoherentRotation(uniform_rotation(2, Pauli::kX, rng.uniform())))));
    Eigen::MatrixXd c(4, 4);
    for (int j = 0; j < 4; ++j) {
      double col = 0;
      for (int i = 0; i < 4; ++i) {
        c(i, j) = rng.uniform();
        col += c(i, j);
      }
      for (int i = 0; i < 4; ++i) c(i, j) /= col;
    }
    CHECK_NOTHROW(apply_noise(m, make_channel(ConfusionMatrix(c))));
    CHECK_NOTHROW(apply_noise(m, make_channel(Composite{{make_channel(Depolarizing(k, {0})),
                                                         make_channel(ProbabilisticIswap(0.2, 0, 1))}})));
  }
}

TEST_CASE("channel parameter validation", "[noise]") {
  CHECK_THROWS_AS(Depolarizing(1.3, {0}), std::invalid_argument);
  CHECK_THROWS_AS(ProbabilisticIswap(-0.1, 0, 1), std::invalid_argument);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.2, 0.2, 0.8;
  CHECK_THROWS_AS(ConfusionMatrix(bad), std::invalid_argument);
  Mat not_unitary = 2.0 * identity(2);
  CHECK_THROWS_AS(CoherentRotation(not_unitary), std::invalid_argument);
}

TEST_CASE("pauli rotation is unitary and periodic", "[noise]") {
  const Mat u = pauli_rotation(Pauli::kX, 0.3);
  CHECK(max_abs(Mat(u.adjoint() * u - identity(2))) < 1e-14);
  // exp(-i pi X) = -1.
  const Mat full = pauli_rotation(Pauli::kX, M_PI);
  CHECK(max_abs(Mat(full + identity(2))) < 1e-12);
}

TEST_CASE("sample_counts: deterministic outcome, reproducibility, totals", "[noise]") {
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  const std::vector<PureState> zero = {basis_state(2, 0)};
  RandomSource rng(2025);
  const ShotCounts c = sample_counts(zero, {"0"}, {z}, {"Z"}, 5000, rng);
  CHECK(c.counts[0][0][0] == 5000);
  CHECK(c.counts[0][0][1] == 0);

  const ShotCounts c2 = sample_counts(zero, {"0"}, {z}, {"Z"}, 5000, RandomSource(2025));
  CHECK(c.counts == c2.counts);

  // Cell totals always equal shots_per_cell.
  RandomSource rng2(31337);
  const auto tetra = tetrahedron_states(1);
  const ShotCounts tc = sample_counts(tetra, tetrahedron_tags(1), {z, projective_povm(MeasurementSetting::parse("X"))},
                                      {"Z", "X"}, 321, rng2);
  for (std::size_t b = 0; b < tc.n_settings(); ++b)
    for (std::size_t s = 0; s < tc.n_states(); ++s) REQUIRE(tc.cell_total(b, s) == 321);
}

TEST_CASE("sample_counts concentrates at the Born frequencies", "[noise]") {
  const Povm z = projective_povm(MeasurementSetting::parse("Z"));
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const long long n = 100000;
  RandomSource rng(55);
  const ShotCounts c = sample_counts(std::vector<PureState>{PureState(plus)}, {"plus"}, {z}, {"Z"}, n, rng);
  const double freq = double(c.counts[0][0][0]) / double(n);
  const double sigma = 0.5 / std::sqrt(double(n));
  CHECK(std::abs(freq - 0.5) < 5 * sigma);
}
