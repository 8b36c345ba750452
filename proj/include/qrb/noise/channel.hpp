#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/noise/setting.hpp"

namespace qrb {

/// Left-stochastic redistribution of outcome probabilities,
/// p~ = C p: column j holds the reported-outcome distribution for true
/// outcome j. On effects this acts as M~_i = sum_j C_ij P_j.
struct ConfusionMatrix {
  Eigen::MatrixXd c;

  explicit ConfusionMatrix(Eigen::MatrixXd m) : c(std::move(m)) {
    if (c.rows() != c.cols() || c.rows() < 1) throw std::invalid_argument("ConfusionMatrix: matrix must be square");
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      double col = 0.0;
      for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if (c(i, j) < 0.0) throw std::invalid_argument("ConfusionMatrix: negative entry");
        col += c(i, j);
      }
      if (std::abs(col - 1.0) > 1e-10) throw std::invalid_argument("ConfusionMatrix: columns must sum to 1");
    }
  }
};

/// Per-qubit depolarizing channel of strength k on the listed qubits:
/// E(M) = (1 - 3k/4) M + (k/4)(XMX + YMY + ZMZ) on each target.
struct Depolarizing {
  double k;
  std::vector<int> qubits;

  Depolarizing(double strength, std::vector<int> targets) : k(strength), qubits(std::move(targets)) {
    if (k < 0.0 || k > 1.0) throw std::invalid_argument("Depolarizing: k must be in [0, 1]");
    if (qubits.empty()) throw std::invalid_argument("Depolarizing: no target qubits");
  }
};

/// E(M) = (1 - k) M + k U M U^dagger with U the iSWAP on the qubit pair.
struct ProbabilisticIswap {
  double k;
  int qubit_a;
  int qubit_b;

  ProbabilisticIswap(double strength, int a, int b) : k(strength), qubit_a(a), qubit_b(b) {
    if (k < 0.0 || k > 1.0) throw std::invalid_argument("ProbabilisticIswap: k must be in [0, 1]");
    if (a == b) throw std::invalid_argument("ProbabilisticIswap: qubits must differ");
  }
};

/// M~_i = U^dagger M_i U.
struct CoherentRotation {
  Mat u;

  explicit CoherentRotation(Mat unitary) : u(std::move(unitary)) {
    if (!is_square(u)) throw std::invalid_argument("CoherentRotation: matrix must be square");
    if (max_abs(Mat(u.adjoint() * u - Mat::Identity(u.rows(), u.cols()))) > 1e-10)
      throw std::invalid_argument("CoherentRotation: matrix is not unitary");
  }
};

struct NoiseChannel;

/// Left-to-right application of the member channels.
struct Composite {
  std::vector<NoiseChannel> channels;
};

struct NoiseChannel {
  std::variant<ConfusionMatrix, Depolarizing, ProbabilisticIswap, CoherentRotation, Composite> v;
};

inline NoiseChannel make_channel(ConfusionMatrix c) { return {std::move(c)}; }
inline NoiseChannel make_channel(Depolarizing d) { return {std::move(d)}; }
inline NoiseChannel make_channel(ProbabilisticIswap s) { return {std::move(s)}; }
inline NoiseChannel make_channel(CoherentRotation r) { return {std::move(r)}; }
inline NoiseChannel make_channel(Composite c) { return {std::move(c)}; }

/// iSWAP: identity on |00>, |11>; |01> <-> |10> with phase i.
inline Mat iswap_unitary() {
  Mat u = Mat::Zero(4, 4);
  u(0, 0) = 1;
  u(3, 3) = 1;
  u(1, 2) = Complex(0, 1);
  u(2, 1) = Complex(0, 1);
  return u;
}

/// exp(-i theta P) = cos(theta) 1 - i sin(theta) P for a Pauli axis P.
/// The Bloch-sphere rotation angle is 2 theta.
inline Mat pauli_rotation(Pauli axis, double theta) {
  return std::cos(theta) * identity(2) - Complex(0, 1) * std::sin(theta) * pauli_matrix(axis);
}

/// Product of the same single-qubit rotation on every qubit.
inline Mat uniform_rotation(int n_qubits, Pauli axis, double theta) {
  Mat u = identity(1);
  const Mat single = pauli_rotation(axis, theta);
  for (int q = 0; q < n_qubits; ++q) u = tensor_product(u, single);
  return u;
}

/// Tensor power of the symmetric single-qubit confusion matrix
/// [[1-e, e], [e, 1-e]].
inline Eigen::MatrixXd symmetric_confusion(int n_qubits, double e) {
  if (e < 0.0 || e > 1.0) throw std::invalid_argument("symmetric_confusion: e must be in [0, 1]");
  Eigen::MatrixXd single(2, 2);
  single << 1 - e, e, e, 1 - e;
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    Eigen::MatrixXd next(c.rows() * 2, c.cols() * 2);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = c(i, j) * single;
    c = std::move(next);
  }
  return c;
}

namespace detail {

inline Mat depolarize_one_qubit(const Mat& m, double k, int n_qubits, int qubit) {
  const Mat x = embed_single_qubit(pauli_x(), n_qubits, qubit);
  const Mat y = embed_single_qubit(pauli_y(), n_qubits, qubit);
  const Mat z = embed_single_qubit(pauli_z(), n_qubits, qubit);
  return (1.0 - 0.75 * k) * m + 0.25 * k * (x * m * x + y * m * y + z * m * z);
}

inline int qubit_count_of_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d % 2 != 0) throw std::invalid_argument("apply_noise: POVM dimension is not a power of two");
    d /= 2;
    ++n;
  }
  return n;
}

}  // namespace detail

Povm apply_noise(const Povm& m, const NoiseChannel& ch);

namespace detail {

struct ApplyVisitor {
  const Povm& input;
  int n_qubits;

  Povm operator()(const ConfusionMatrix& ch) const {
    const auto n = static_cast<Eigen::Index>(input.n_outcomes());
    if (ch.c.rows() != n) throw std::invalid_argument("apply_noise: confusion matrix dimension does not match outcome count");
    std::vector<Mat> out(input.n_outcomes());
    for (Eigen::Index i = 0; i < n; ++i) {
      Mat acc = Mat::Zero(input.dim(), input.dim());
      for (Eigen::Index j = 0; j < n; ++j) acc += ch.c(i, j) * input.effect(static_cast<std::size_t>(j));
      out[static_cast<std::size_t>(i)] = hermitize(acc);
    }
    return Povm(std::move(out), input.outcome_labels());
  }

  Povm operator()(const Depolarizing& d) const {
    std::vector<Mat> out = input.effects();
    for (int q : d.qubits) {
      if (q < 0 || q >= n_qubits) throw std::invalid_argument("apply_noise: depolarizing target qubit out of range");
      for (Mat& e : out) e = depolarize_one_qubit(e, d.k, n_qubits, q);
    }
    for (Mat& e : out) e = hermitize(e);
    return Povm(std::move(out), input.outcome_labels());
  }

  Povm operator()(const ProbabilisticIswap& s) const {
    if (n_qubits != 2 || !((s.qubit_a == 0 && s.qubit_b == 1) || (s.qubit_a == 1 && s.qubit_b == 0)))
      throw std::invalid_argument("apply_noise: iSWAP supported on the (0, 1) pair of a two-qubit POVM");
    const Mat u = iswap_unitary();
    std::vector<Mat> out = input.effects();
    for (Mat& e : out) e = hermitize((1.0 - s.k) * e + s.k * (u * e * u.adjoint()));
    return Povm(std::move(out), input.outcome_labels());
  }

  Povm operator()(const CoherentRotation& r) const {
    if (r.u.rows() != input.dim()) throw std::invalid_argument("apply_noise: rotation dimension mismatch");
    std::vector<Mat> out = input.effects();
    for (Mat& e : out) e = hermitize(r.u.adjoint() * e * r.u);
    return Povm(std::move(out), input.outcome_labels());
  }

  Povm operator()(const Composite& comp) const {
    Povm current = input;
    for (const NoiseChannel& c : comp.channels) current = apply_noise(current, c);
    return current;
  }
};

}  // namespace detail

/// Applies a readout-noise channel to a POVM. The result is validated
/// by the Povm constructor, so it always satisfies the POVM invariants.
inline Povm apply_noise(const Povm& m, const NoiseChannel& ch) {
  return std::visit(detail::ApplyVisitor{m, detail::qubit_count_of_dim(m.dim())}, ch.v);
}

}  // namespace qrb
