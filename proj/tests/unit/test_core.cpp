#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "support/oracles.hpp"

using namespace qrb;

namespace {

Mat ket_projector(int dim, int idx) {
  Mat m = Mat::Zero(dim, dim);
  m(idx, idx) = 1.0;
  return m;
}

Povm ideal_z_povm() {
  return Povm({ket_projector(2, 0), ket_projector(2, 1)}, {"0", "1"});
}

}  // namespace

TEST_CASE("tensor product identity and diagonal cases", "[core]") {
  CHECK(max_abs(Mat(tensor_product(identity(2), identity(2)) - identity(4))) == 0.0);

  const Mat zz = tensor_product(pauli_z(), pauli_z());
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = 1;
  expected(1, 1) = -1;
  expected(2, 2) = -1;
  expected(3, 3) = 1;
  CHECK(max_abs(Mat(zz - expected)) == 0.0);
}

TEST_CASE("tensor product fixes bit ordering: |0><0| x |1><1|", "[core]") {
  const Mat p = tensor_product(ket_projector(2, 0), ket_projector(2, 1));
  Mat expected = Mat::Zero(4, 4);
  expected(1, 1) = 1;  // outcome "01": qubit 0 is the most significant bit
  CHECK(max_abs(Mat(p - expected)) == 0.0);
}

TEST_CASE("tensor product is associative exactly on dyadic entries", "[core]") {
  RandomSource rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat a = oracles::random_dyadic(2, rng);
    const Mat b = oracles::random_dyadic(2, rng);
    const Mat c = oracles::random_dyadic(2, rng);
    const Mat left = tensor_product(tensor_product(a, b), c);
    const Mat right = tensor_product(a, tensor_product(b, c));
    REQUIRE(max_abs(Mat(left - right)) == 0.0);
  }
}

TEST_CASE("spectral norm of Pauli and diagonal matrices", "[core]") {
  CHECK(spectral_norm(pauli_z()) == Catch::Approx(1.0).margin(1e-14));
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -0.5;
  CHECK(spectral_norm(d) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("spectral norm matches the Jacobi eigenvalue oracle on Hermitian inputs", "[core]") {
  RandomSource rng(7);
  for (Eigen::Index dim : {2, 4, 8}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Mat h = oracles::random_hermitian(dim, rng);
      CHECK(spectral_norm(h) == Catch::Approx(oracles::spectral_norm_hermitian(h)).margin(1e-10));
    }
  }
}

TEST_CASE("spectral norm matches oracle on general matrices", "[core]") {
  RandomSource rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Mat g(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) g(i, j) = rng.complex_gaussian();
    CHECK(spectral_norm(g) == Catch::Approx(oracles::spectral_norm_general(g)).margin(1e-9));
  }
}

TEST_CASE("psd projection clips by the stated rule", "[core]") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -0.2;
  const Mat p = psd_projection(d);
  CHECK(p(0, 0).real() == Catch::Approx(1.0).margin(1e-14));
  CHECK(std::abs(p(1, 1)) < 1e-14);
}

TEST_CASE("psd projection leaves PSD inputs unchanged", "[core]") {
  RandomSource rng(5);
  const DensityMatrix rho = ginibre_density(4, 4, rng);
  CHECK(max_abs(Mat(psd_projection(rho.matrix()) - rho.matrix())) < 1e-12);
}

TEST_CASE("psd projection agrees with the eigen-clip oracle", "[core]") {
  RandomSource rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat h = oracles::random_hermitian(4, rng);
    const Mat lib = psd_projection(h);
    const Mat orc = oracles::psd_clip(h);
    CHECK(max_abs(Mat(lib - orc)) < 1e-9);
  }
}

TEST_CASE("psd projection rejects non-Hermitian input", "[core]") {
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(psd_projection(a), std::invalid_argument);
}

TEST_CASE("partial trace against index-loop oracle", "[core]") {
  RandomSource rng(23);
  const Mat a = oracles::random_hermitian(4, rng);
  // Tr_1: keep qubit 0.
  Mat keep0 = Mat::Zero(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k) keep0(r, c) += a(2 * r + k, 2 * c + k);
  CHECK(max_abs(Mat(partial_trace_qubit(a, 2, 1) - keep0)) < 1e-14);
  Mat keep1 = Mat::Zero(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k) keep1(r, c) += a(2 * k + r, 2 * k + c);
  CHECK(max_abs(Mat(partial_trace_qubit(a, 2, 0) - keep1)) < 1e-14);
}

TEST_CASE("haar product states are normalized, pure and reproducible", "[core]") {
  RandomSource rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const PureState psi = haar_random_product_state(2, rng);
    CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-12);
    const DensityMatrix rho = density_of(psi);
    CHECK(rho.purity() == Catch::Approx(1.0).margin(1e-12));
  }

  RandomSource a(99), b(99);
  const PureState s1 = haar_random_product_state(3, a);
  const PureState s2 = haar_random_product_state(3, b);
  REQUIRE(s1.amplitudes().size() == s2.amplitudes().size());
  for (Eigen::Index i = 0; i < s1.amplitudes().size(); ++i) REQUIRE(s1.amplitudes()(i) == s2.amplitudes()(i));
}

TEST_CASE("haar sampling has zero mean Bloch vector", "[core][slow]") {
  const int n = 100000;
  RandomSource rng(2024);
  double sx = 0, sy = 0, sz = 0;
  for (int i = 0; i < n; ++i) {
    const PureState psi = haar_random_product_state(1, rng);
    const Mat rho = psi.projector();
    sx += (rho * pauli_x()).trace().real();
    sy += (rho * pauli_y()).trace().real();
    sz += (rho * pauli_z()).trace().real();
  }
  const double sigma = 1.0 / std::sqrt(3.0 * n);
  CHECK(std::abs(sx / n) < 3 * sigma);
  CHECK(std::abs(sy / n) < 3 * sigma);
  CHECK(std::abs(sz / n) < 3 * sigma);
}

TEST_CASE("ginibre density construction", "[core]") {
  RandomSource rng(31);
  const DensityMatrix pure = ginibre_density(4, 1, rng);
  CHECK(pure.purity() == Catch::Approx(1.0).margin(1e-12));

  for (int rep = 0; rep < 20; ++rep) {
    const DensityMatrix rho = ginibre_density(4, 4, rng);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
    CHECK(hermitian_eigenvalues(rho.matrix()).minCoeff() > -1e-12);
  }

  CHECK_THROWS_AS(ginibre_density(4, 5, rng), std::invalid_argument);
  CHECK_THROWS_AS(ginibre_density(4, 0, rng), std::invalid_argument);
}

TEST_CASE("ginibre ensemble mean approaches the maximally mixed state", "[core][slow]") {
  RandomSource rng(77);
  const int n = 20000;
  Mat mean = Mat::Zero(2, 2);
  for (int i = 0; i < n; ++i) mean += ginibre_density(2, 2, rng).matrix();
  mean /= double(n);
  // Entry fluctuations scale like 1/sqrt(n); 3 sigma with a safe
  // constant for the entry variance (< 0.3 for dim 2).
  CHECK(max_abs(Mat(mean - 0.5 * identity(2))) < 3 * 0.3 / std::sqrt(double(n)));
}

TEST_CASE("born probabilities: projective eigencase and tetrahedron state", "[core]") {
  const Povm z = ideal_z_povm();
  const auto p0 = born_probabilities(basis_state(2, 0), z);
  CHECK(p0[0] == Catch::Approx(1.0).margin(1e-14));
  CHECK(p0[1] == Catch::Approx(0.0).margin(1e-14));

  Vec psi2(2);
  psi2 << 1.0 / std::sqrt(3.0), std::sqrt(2.0 / 3.0);
  const auto p = born_probabilities(PureState(psi2), z);
  CHECK(p[0] == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(p[1] == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("born probabilities of the maximally mixed state equal Tr(M_i)/dim", "[core]") {
  RandomSource rng(3);
  const Povm m = oracles::random_povm(4, 4, rng);
  const auto p = born_probabilities(maximally_mixed(4), m);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double expected = oracles::trace_product(m.effect(i), identity(4)).real() / 4.0;
    CHECK(p[i] == Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("born probabilities sum to one and lie in [0, 1] on random inputs", "[core]") {
  RandomSource rng(29);
  for (int rep = 0; rep < 25; ++rep) {
    const Povm m = oracles::random_povm(4, 4, rng);
    const DensityMatrix rho = ginibre_density(4, 2 + int(rng.bits() % 3), rng);
    const auto p = born_probabilities(rho, m);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("pure infidelity special values", "[core]") {
  RandomSource rng(41);
  const PureState psi = haar_random_product_state(1, rng);
  CHECK(pure_infidelity(density_of(psi), psi) == Catch::Approx(0.0).margin(1e-12));
  CHECK(pure_infidelity(maximally_mixed(2), psi) == Catch::Approx(0.5).margin(1e-12));
  CHECK(pure_infidelity(density_of(basis_state(2, 1)), basis_state(2, 0)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("conditional marginal of a product POVM ignores the conditioning state", "[core]") {
  RandomSource rng(53);
  const Povm a = oracles::random_povm(2, 2, rng);
  const Povm b = oracles::random_povm(2, 2, rng);
  std::vector<Mat> effects;
  for (const Mat& ea : a.effects())
    for (const Mat& eb : b.effects()) effects.push_back(tensor_product(ea, eb));
  const Povm product(std::move(effects), bitstring_labels(4, 2));

  const DensityMatrix sigma = ginibre_density(2, 2, rng);
  const auto marg = conditional_marginal(product, 0, sigma);
  CHECK(max_abs(Mat(marg[0] - a.effect(0))) < 1e-12);
  CHECK(max_abs(Mat(marg[1] - a.effect(1))) < 1e-12);

  const auto marg1 = conditional_marginal(product, 1, sigma);
  CHECK(max_abs(Mat(marg1[0] - b.effect(0))) < 1e-12);
  CHECK(max_abs(Mat(marg1[1] - b.effect(1))) < 1e-12);
}

TEST_CASE("conditional marginal of ideal ZZ projectors is the ideal Z POVM", "[core]") {
  std::vector<Mat> effects;
  for (int i = 0; i < 4; ++i) effects.push_back(ket_projector(4, i));
  const Povm zz(std::move(effects), bitstring_labels(4, 2));
  const auto marg = conditional_marginal(zz, 0, density_of(basis_state(2, 0)));
  CHECK(max_abs(Mat(marg[0] - ket_projector(2, 0))) < 1e-14);
  CHECK(max_abs(Mat(marg[1] - ket_projector(2, 1))) < 1e-14);
}

TEST_CASE("conditional marginal matches the brute-force trace oracle", "[core]") {
  RandomSource rng(59);
  for (int rep = 0; rep < 10; ++rep) {
    const Povm m = oracles::random_povm(4, 4, rng);
    const DensityMatrix sigma = ginibre_density(2, 2, rng);
    for (int keep = 0; keep < 2; ++keep) {
      const auto lib = conditional_marginal(m, keep, sigma);
      const auto orc = oracles::conditional_marginal_bruteforce(m.effects(), keep, sigma.matrix());
      CHECK(max_abs(Mat(lib[0] - orc[0])) < 1e-12);
      CHECK(max_abs(Mat(lib[1] - orc[1])) < 1e-12);
    }
  }
}

TEST_CASE("conditional marginal always yields a valid single-qubit POVM", "[core]") {
  RandomSource rng(61);
  for (int rep = 0; rep < 20; ++rep) {
    const Povm m = oracles::random_povm(4, 4, rng);
    const DensityMatrix sigma = ginibre_density(2, 1 + int(rng.bits() % 2), rng);
    for (int keep = 0; keep < 2; ++keep) {
      const auto marg = conditional_marginal(m, keep, sigma);
      // Validity: Hermitian, PSD, sums to the single-qubit identity.
      CHECK_NOTHROW(Povm(std::vector<Mat>{marg[0], marg[1]}, std::vector<std::string>{"0", "1"}));
    }
  }
}

TEST_CASE("povm validation rejects broken inputs", "[core]") {
  // Not summing to identity.
  CHECK_THROWS_AS(Povm({ket_projector(2, 0), 0.5 * ket_projector(2, 1)},
                       {"0", "1"}),
                  std::invalid_argument);
  // Negative effect.
  Mat neg = -0.1 * identity(2);
  Mat rest = 1.1 * identity(2);
  CHECK_THROWS_AS(Povm({neg, rest}, {"0", "1"}), std::invalid_argument);
  // Label mismatch.
  CHECK_THROWS_AS(Povm({identity(2)}, {"0", "1"}), std::invalid_argument);
}

TEST_CASE("random source determinism and stream splitting", "[core]") {
  RandomSource a(123), b(123);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());

  RandomSource base(7);
  RandomSource c1 = base.derive(0);
  RandomSource c2 = base.derive(1);
  CHECK(c1.uniform() != c2.uniform());

  RandomSource d1 = base.derive(0);
  RandomSource d2 = base.derive(0);
  for (int i = 0; i < 10; ++i) REQUIRE(d1.bits() == d2.bits());
}

TEST_CASE("multinomial sampling conserves totals and hits expectations", "[core]") {
  RandomSource rng(777);
  const std::vector<double> p = {0.5, 0.3, 0.2};
  const auto counts = rng.multinomial(100000, p);
  long long total = 0;
  for (long long c : counts) total += c;
  REQUIRE(total == 100000);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sigma = std::sqrt(p[i] * (1 - p[i]) / 100000.0);
    CHECK(std::abs(double(counts[i]) / 100000.0 - p[i]) < 5 * sigma);
  }
}

TEST_CASE("trace distance basics", "[core]") {
  CHECK(trace_distance(identity(2) * 0.5, identity(2) * 0.5) == Catch::Approx(0.0).margin(1e-14));
  CHECK(trace_distance(ket_projector(2, 0), ket_projector(2, 1)) == Catch::Approx(1.0).margin(1e-12));
}
