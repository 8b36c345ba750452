#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"

namespace qrb {

struct CoherentErrorReport {
  double epsilon_coh = 0.0;
  // The distance is always the average-case POVM distance d_AV.
};

/// Average-case POVM distance:
///   d_AV(M, N) = (1/2d) sum_i sqrt(||M_i - N_i||_HS^2 + Tr(M_i - N_i)^2)
/// with d the effect dimension and ||A||_HS = sqrt(Tr(A^2)) for
/// Hermitian A.
inline double average_case_distance(const Povm& m, const Povm& n) {
  if (m.dim() != n.dim() || m.n_outcomes() != n.n_outcomes())
    throw std::invalid_argument("average_case_distance: POVM shapes differ");
  const double d = static_cast<double>(m.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < m.n_outcomes(); ++i) {
    const Mat diff = m.effect(i) - n.effect(i);
    // Tr(A^2) = Tr(A^dagger A) for the Hermitian differences here.
    const double hs2 = diff.squaredNorm();
    const double tr = diff.trace().real();
    sum += std::sqrt(hs2 + tr * tr);
  }
  return sum / (2.0 * d);
}

/// POVM with all off-diagonal entries removed (the maximally dephasing
/// channel applied to every effect).
inline Povm dephased(const Povm& m) {
  std::vector<Mat> effects;
  effects.reserve(m.n_outcomes());
  for (const Mat& e : m.effects()) effects.push_back(e.diagonal().asDiagonal());
  return Povm(std::move(effects), m.outcome_labels());
}

/// eps_coh = d_AV(M, diag(M)): distance of the POVM from its fully
/// dephased version, zero exactly for classical (diagonal) POVMs.
inline CoherentErrorReport coherent_error(const Povm& m) {
  return CoherentErrorReport{average_case_distance(m, dephased(m))};
}

}  // namespace qrb
