#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/core/state.hpp"

namespace qrb {

/// The four symmetric informationally complete single-qubit states:
///   |psi_1> = |0>
///   |psi_k> = sqrt(1/3)|0> + sqrt(2/3) e^{i 2pi (k-2)/3} |1>,  k = 2..4
inline std::vector<PureState> tetrahedron_states_1q() {
  std::vector<PureState> out;
  Vec v(2);
  v << 1, 0;
  out.emplace_back(v);
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  for (int k = 0; k < 3; ++k) {
    const double phi = 2.0 * M_PI * k / 3.0;
    Vec w(2);
    w << a, b * Complex(std::cos(phi), std::sin(phi));
    out.emplace_back(w);
  }
  return out;
}

/// All 4^n tensor products of the single-qubit tetrahedron states,
/// ordered lexicographically by per-qubit index (qubit 0 most
/// significant).
inline std::vector<PureState> tetrahedron_states(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 3) throw std::invalid_argument("tetrahedron_states: supported qubit counts are 1..3");
  const auto single = tetrahedron_states_1q();
  long long total = 1;
  for (int i = 0; i < n_qubits; ++i) total *= 4;
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(total));
  for (long long idx = 0; idx < total; ++idx) {
    Vec amp(1);
    amp(0) = 1.0;
    long long rem = idx;
    long long divisor = total / 4;
    for (int q = 0; q < n_qubits; ++q) {
      const auto k = static_cast<std::size_t>(rem / divisor);
      rem %= divisor;
      divisor /= 4;
      const Vec& s = single[k].amplitudes();
      Vec next(amp.size() * 2);
      for (Eigen::Index i = 0; i < amp.size(); ++i) {
        next(2 * i) = amp(i) * s(0);
        next(2 * i + 1) = amp(i) * s(1);
      }
      amp.swap(next);
    }
    out.emplace_back(std::move(amp));
  }
  return out;
}

/// Tags "t0".."t{4^n-1}" matching tetrahedron_states order.
inline std::vector<std::string> tetrahedron_tags(int n_qubits) {
  long long total = 1;
  for (int i = 0; i < n_qubits; ++i) total *= 4;
  std::vector<std::string> tags;
  tags.reserve(static_cast<std::size_t>(total));
  for (long long i = 0; i < total; ++i) tags.push_back("t" + std::to_string(i));
  return tags;
}

}  // namespace qrb
