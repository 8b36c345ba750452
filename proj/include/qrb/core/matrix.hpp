#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrb {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Tolerances used by the type invariants. States are held to a tighter
// bound than POVMs because estimators accumulate more round-off into
// reconstructed effects.
inline constexpr double kStateTol = 1e-10;
inline constexpr double kPovmTol = 1e-8;

inline bool is_square(const Mat& a) { return a.rows() == a.cols() && a.rows() >= 1; }

inline double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Mat& a, double tol) {
  return is_square(a) && max_abs(Mat(a - a.adjoint())) <= tol;
}

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

inline Mat identity(Eigen::Index dim) { return Mat::Identity(dim, dim); }

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli_y() {
  Mat m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Kronecker product with `a` on the more significant qubit index:
/// qubit 0 is the leftmost tensor factor and the most significant bit
/// of outcome labels.
inline Mat tensor_product(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat tensor_product(const std::vector<Mat>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: empty factor list");
  Mat out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor_product(out, factors[i]);
  return out;
}

/// Single-qubit operator embedded at `qubit` of an n-qubit register.
inline Mat embed_single_qubit(const Mat& op, int n_qubits, int qubit) {
  if (op.rows() != 2 || op.cols() != 2) throw std::invalid_argument("embed_single_qubit: operator must be 2x2");
  if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("embed_single_qubit: qubit index out of range");
  std::vector<Mat> factors(static_cast<std::size_t>(n_qubits), identity(2));
  factors[static_cast<std::size_t>(qubit)] = op;
  return tensor_product(factors);
}

/// Partial trace over one qubit of an n-qubit operator.
inline Mat partial_trace_qubit(const Mat& a, int n_qubits, int qubit) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  if (a.rows() != dim || a.cols() != dim) throw std::invalid_argument("partial_trace_qubit: dimension mismatch");
  if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("partial_trace_qubit: qubit index out of range");
  const Eigen::Index out_dim = dim / 2;
  // Bit position of `qubit` in the row index (qubit 0 = most significant).
  const int shift = n_qubits - 1 - qubit;
  const Eigen::Index bit = Eigen::Index(1) << shift;
  const Eigen::Index low_mask = bit - 1;
  auto expand = [&](Eigen::Index r, Eigen::Index q) {
    return ((r & ~low_mask) << 1) | (q << shift) | (r & low_mask);
  };
  Mat out = Mat::Zero(out_dim, out_dim);
  for (Eigen::Index r = 0; r < out_dim; ++r)
    for (Eigen::Index c = 0; c < out_dim; ++c)
      for (Eigen::Index q = 0; q < 2; ++q) out(r, c) += a(expand(r, q), expand(c, q));
  return out;
}

/// Largest singular value.
inline double spectral_norm(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to
/// zero in the eigenbasis, then re-symmetrize.
inline Mat psd_projection(const Mat& a) {
  if (!is_hermitian(a, kPovmTol)) throw std::invalid_argument("psd_projection: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return hermitize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
}

/// Round-off repair for estimator iterates: clips eigenvalues in
/// [-max_clip, 0) to zero and leaves anything more negative alone so
/// that validation still catches genuine violations.
inline Mat repair_psd_roundoff(const Mat& a, double max_clip = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  if (es.eigenvalues().minCoeff() < -max_clip) return a;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return hermitize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
}

/// (1/2)||a - b||_1 for Hermitian a, b.
inline double trace_distance(const Mat& a, const Mat& b) {
  return 0.5 * hermitian_eigenvalues(Mat(a - b)).cwiseAbs().sum();
}

/// sqrt(Tr(A^dagger A)).
inline double hs_norm(const Mat& a) { return std::sqrt(a.squaredNorm()); }

}  // namespace qrb
