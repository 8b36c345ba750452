#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"

namespace qrb {

enum class Pauli { kX, kY, kZ };

inline char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::kX: return 'X';
    case Pauli::kY: return 'Y';
    default: return 'Z';
  }
}

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': case 'x': return Pauli::kX;
    case 'Y': case 'y': return Pauli::kY;
    case 'Z': case 'z': return Pauli::kZ;
    default: throw std::invalid_argument(std::string("unknown Pauli basis '") + c + "'");
  }
}

inline Mat pauli_matrix(Pauli p) {
  switch (p) {
    case Pauli::kX: return pauli_x();
    case Pauli::kY: return pauli_y();
    default: return pauli_z();
  }
}

/// One measurement basis per qubit; char 0 of the string form is qubit 0.
struct MeasurementSetting {
  std::vector<Pauli> bases;

  std::string str() const {
    std::string s;
    for (Pauli p : bases) s += pauli_char(p);
    return s;
  }

  static MeasurementSetting parse(const std::string& s) {
    MeasurementSetting m;
    for (char c : s) m.bases.push_back(pauli_from_char(c));
    return m;
  }

  int n_qubits() const { return static_cast<int>(bases.size()); }
};

/// All 3^n Pauli settings, lexicographic in X < Y < Z with qubit 0 as
/// the most significant digit.
inline std::vector<MeasurementSetting> all_settings(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("all_settings: n_qubits must be >= 1");
  long long total = 1;
  for (int i = 0; i < n_qubits; ++i) total *= 3;
  static constexpr std::array<Pauli, 3> order = {Pauli::kX, Pauli::kY, Pauli::kZ};
  std::vector<MeasurementSetting> out;
  out.reserve(static_cast<std::size_t>(total));
  for (long long idx = 0; idx < total; ++idx) {
    MeasurementSetting s;
    s.bases.resize(static_cast<std::size_t>(n_qubits));
    long long rem = idx;
    for (int q = n_qubits - 1; q >= 0; --q) {
      s.bases[static_cast<std::size_t>(q)] = order[static_cast<std::size_t>(rem % 3)];
      rem /= 3;
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Eigenvectors of the single-qubit Pauli: [0] is the +1 eigenstate
/// (outcome bit 0), [1] the -1 eigenstate.
inline std::array<Vec, 2> pauli_eigenbasis(Pauli p) {
  Vec plus(2), minus(2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (p) {
    case Pauli::kX:
      plus << inv_sqrt2, inv_sqrt2;
      minus << inv_sqrt2, -inv_sqrt2;
      break;
    case Pauli::kY:
      plus << inv_sqrt2, Complex(0, inv_sqrt2);
      minus << inv_sqrt2, Complex(0, -inv_sqrt2);
      break;
    default:
      plus << 1, 0;
      minus << 0, 1;
      break;
  }
  return {plus, minus};
}

/// Unitary whose columns are the setting's eigenbasis: maps
/// computational basis state |b> to the eigenstate with outcome bits b.
inline Mat setting_eigenbasis(const MeasurementSetting& setting) {
  Mat u = identity(1);
  for (Pauli p : setting.bases) {
    const auto basis = pauli_eigenbasis(p);
    Mat single(2, 2);
    single.col(0) = basis[0];
    single.col(1) = basis[1];
    u = tensor_product(u, single);
  }
  return u;
}

/// Rank-1 projectors onto the tensor-product eigenbasis of the setting;
/// outcome bit 0 marks the +1 eigenstate.
inline Povm projective_povm(const MeasurementSetting& setting) {
  const int n = setting.n_qubits();
  const Mat u = setting_eigenbasis(setting);
  const Eigen::Index dim = u.rows();
  std::vector<Mat> effects;
  effects.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Vec v = u.col(i);
    effects.push_back(v * v.adjoint());
  }
  return Povm(std::move(effects), bitstring_labels(dim, n));
}

}  // namespace qrb
