#pragma once

// Independent numerical oracles for the test suite. Everything here is
// deliberately implemented from scratch (index loops, hand-rolled
// Jacobi rotations) so that library results are checked against a
// different computational route.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"

namespace oracles {

using qrb::Complex;
using qrb::Mat;

struct EigenSystem {
  std::vector<double> values;  // ascending
  Mat vectors;                 // columns
};

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
inline EigenSystem jacobi_hermitian(Mat a) {
  const auto n = a.rows();
  Mat v = Mat::Identity(n, n);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off < 1e-15 * std::max(1.0, a.cwiseAbs().maxCoeff())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) == 0.0) continue;
        // Phase-rotate the q column so the pivot entry becomes real,
        // then apply a real Jacobi rotation to zero it.
        const Complex phase = std::conj(apq) / std::abs(apq);  // e^{-i arg}
        const double b = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * b);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Column operations: col_p' = c*col_p - s*phase*col_q;
        //                    col_q' = s*conj(phase)^{-1}... build U and
        // conjugate explicitly for clarity (dims are tiny).
        Mat u = Mat::Identity(n, n);
        u(p, p) = c;
        u(p, q) = s;
        u(q, p) = -s * phase;
        u(q, q) = c * phase;
        a = (u.adjoint() * a * u).eval();
        v = (v * u).eval();
      }
  }
  EigenSystem sys;
  sys.values.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sys.values[static_cast<std::size_t>(i)] = a(i, i).real();
  // Sort ascending, permuting the vectors alongside.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  Mat sorted(n, n);
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted.col(i) = v.col(idx[static_cast<std::size_t>(i)]);
    vals[static_cast<std::size_t>(i)] = a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)]).real();
  }
  sys.values = vals;
  sys.vectors = sorted;
  return sys;
}

/// max |eigenvalue| of a Hermitian matrix via the Jacobi oracle.
inline double spectral_norm_hermitian(const Mat& a) {
  const auto sys = jacobi_hermitian(a);
  double best = 0.0;
  for (double v : sys.values) best = std::max(best, std::abs(v));
  return best;
}

/// Largest singular value via eigenvalues of A^dagger A.
inline double spectral_norm_general(const Mat& a) {
  return std::sqrt(std::max(0.0, jacobi_hermitian(Mat(a.adjoint() * a)).values.back()));
}

/// Eigenvalue clipping in the Jacobi eigenbasis.
inline Mat psd_clip(const Mat& a) {
  const auto sys = jacobi_hermitian(a);
  const auto n = a.rows();
  Mat out = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = std::max(0.0, sys.values[static_cast<std::size_t>(i)]);
    out += lam * (sys.vectors.col(i) * sys.vectors.col(i).adjoint());
  }
  return out;
}

/// Entrywise trace oracle: Tr(a b) by explicit index loops.
inline Complex trace_product(const Mat& a, const Mat& b) {
  Complex t = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
  return t;
}

/// Conditional marginal of a two-qubit POVM by brute-force index sums:
///   E_x[a, b] = sum_{x_j, c, d} M_{(x, x_j)}[(a, c), (b, d)] sigma[d, c]
/// for keep = 0 (indices (row_q0, row_q1) -> 2*row_q0 + row_q1), and
/// the mirrored expression for keep = 1.
inline std::array<Mat, 2> conditional_marginal_bruteforce(const std::vector<Mat>& effects, int keep,
                                                          const Mat& sigma) {
  std::array<Mat, 2> out = {Mat::Zero(2, 2), Mat::Zero(2, 2)};
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1) {
      const Mat& m = effects[static_cast<std::size_t>(2 * x0 + x1)];
      const int kept_bit = keep == 0 ? x0 : x1;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d) {
              if (keep == 0)
                out[kept_bit](a, b) += m(2 * a + c, 2 * b + d) * sigma(d, c);
              else
                out[kept_bit](a, b) += m(2 * c + a, 2 * d + b) * sigma(d, c);
            }
    }
  return out;
}

/// Random Hermitian matrix with dyadic entries (multiples of 1/16) so
/// that products compose exactly in double precision.
inline Mat random_dyadic_hermitian(Eigen::Index dim, qrb::RandomSource& rng) {
  Mat a(dim, dim);
  auto dyadic = [&] { return (static_cast<double>(rng.bits() % 33) - 16.0) / 16.0; };
  for (Eigen::Index i = 0; i < dim; ++i) {
    a(i, i) = dyadic();
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const Complex z(dyadic(), dyadic());
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return a;
}

inline Mat random_dyadic(Eigen::Index dim, qrb::RandomSource& rng) {
  Mat a(dim, dim);
  auto dyadic = [&] { return (static_cast<double>(rng.bits() % 33) - 16.0) / 16.0; };
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(dyadic(), dyadic());
  return a;
}

inline Mat random_hermitian(Eigen::Index dim, qrb::RandomSource& rng) {
  Mat a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    a(i, i) = rng.gaussian();
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const Complex z(rng.gaussian(), rng.gaussian());
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return a;
}

/// Random valid POVM: PSD blocks A_i normalized by S^{-1/2} A_i S^{-1/2}
/// with S their sum.
inline qrb::Povm random_povm(Eigen::Index dim, std::size_t n_outcomes, qrb::RandomSource& rng) {
  std::vector<Mat> blocks;
  Mat sum = Mat::Zero(dim, dim);
  for (std::size_t i = 0; i < n_outcomes; ++i) {
    Mat g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
    Mat block = g * g.adjoint();
    blocks.push_back(block);
    sum += block;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sum);
  Mat inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().adjoint();
  std::vector<Mat> effects;
  effects.reserve(n_outcomes);
  for (const Mat& b : blocks) effects.push_back(qrb::hermitize(inv_sqrt * b * inv_sqrt));
  return qrb::Povm(std::move(effects));
}

}  // namespace oracles
