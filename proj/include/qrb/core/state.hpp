#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/random.hpp"

namespace qrb {

/// Normalized pure state on n qubits.
class PureState {
 public:
  explicit PureState(Vec amplitudes) : amp_(std::move(amplitudes)) {
    const auto dim = amp_.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) throw std::invalid_argument("PureState: dimension must be a power of two >= 2");
    if (std::abs(amp_.squaredNorm() - 1.0) > kStateTol) throw std::invalid_argument("PureState: amplitudes are not normalized");
  }

  const Vec& amplitudes() const { return amp_; }
  Eigen::Index dim() const { return amp_.size(); }
  int n_qubits() const {
    int n = 0;
    for (Eigen::Index d = amp_.size(); d > 1; d >>= 1) ++n;
    return n;
  }

  Mat projector() const { return amp_ * amp_.adjoint(); }

 private:
  Vec amp_;
};

/// Hermitian, PSD, unit-trace operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m) : m_(std::move(m)) {
    if (!is_square(m_)) throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (!is_hermitian(m_, kStateTol)) throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kStateTol || std::abs(m_.trace().imag()) > kStateTol)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    if (hermitian_eigenvalues(m_).minCoeff() < -kStateTol)
      throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }

  const Mat& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  double purity() const { return (m_ * m_).trace().real(); }

 private:
  Mat m_;
};

inline DensityMatrix density_of(const PureState& psi) { return DensityMatrix(psi.projector()); }

inline DensityMatrix maximally_mixed(Eigen::Index dim) { return DensityMatrix(Mat::Identity(dim, dim) / double(dim)); }

inline PureState basis_state(Eigen::Index dim, Eigen::Index index) {
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

/// Single-qubit pure state with Bloch vector u (must be unit length).
inline DensityMatrix bloch_state(double ux, double uy, double uz) {
  Mat m = 0.5 * (identity(2) + ux * pauli_x() + uy * pauli_y() + uz * pauli_z());
  return DensityMatrix(hermitize(m));
}

/// rho = G G^dagger / Tr(G G^dagger) with G a dim x rank complex
/// Gaussian matrix.
inline DensityMatrix ginibre_density(Eigen::Index dim, Eigen::Index rank, RandomSource& rng) {
  if (rank < 1 || rank > dim) throw std::invalid_argument("ginibre_density: rank out of range");
  Mat g(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = rng.complex_gaussian();
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitize(rho));
}

/// Haar-random single-qubit unitary: QR decomposition of a 2x2 complex
/// Gaussian matrix with the R-diagonal phase correction.
inline Mat haar_unitary_2(RandomSource& rng) {
  Vec g1(2), g2(2);
  g1 << rng.complex_gaussian(), rng.complex_gaussian();
  g2 << rng.complex_gaussian(), rng.complex_gaussian();
  // Gram-Schmidt.
  const double n1 = std::sqrt(g1.squaredNorm());
  Vec q1 = g1 / n1;
  const Complex r12 = q1.adjoint() * g2;
  Vec v2 = g2 - r12 * q1;
  const double n2 = std::sqrt(v2.squaredNorm());
  Vec q2 = v2 / n2;
  // Phase correction: column i is multiplied by r_ii / |r_ii|. With
  // Gram-Schmidt the r_ii are already real positive, which is exactly
  // the corrected convention.
  const Complex r11 = q1.adjoint() * g1;
  const Complex r22 = q2.adjoint() * g2;
  Mat u(2, 2);
  u.col(0) = q1 * (r11 / std::abs(r11));
  u.col(1) = q2 * (r22 / std::abs(r22));
  return u;
}

/// Product of independent Haar-random single-qubit states U|0>.
inline PureState haar_random_product_state(int n_qubits, RandomSource& rng) {
  if (n_qubits < 1) throw std::invalid_argument("haar_random_product_state: n_qubits must be >= 1");
  Vec amp(1);
  amp(0) = 1.0;
  for (int q = 0; q < n_qubits; ++q) {
    const Mat u = haar_unitary_2(rng);
    Vec single = u.col(0);
    Vec next(amp.size() * 2);
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
      next(2 * i) = amp(i) * single(0);
      next(2 * i + 1) = amp(i) * single(1);
    }
    amp.swap(next);
  }
  // Renormalize away accumulated round-off before validation.
  amp /= std::sqrt(amp.squaredNorm());
  return PureState(std::move(amp));
}

/// I = 1 - Tr(rho |sigma><sigma|), the pure-target infidelity.
inline double pure_infidelity(const DensityMatrix& rho, const PureState& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("pure_infidelity: dimension mismatch");
  const double overlap = (sigma.amplitudes().adjoint() * rho.matrix() * sigma.amplitudes())(0).real();
  double inf = 1.0 - overlap;
  if (inf < -1e-8) throw std::runtime_error("pure_infidelity: overlap exceeds 1 beyond tolerance");
  return std::min(1.0, inf);
}

}  // namespace qrb
