#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/state.hpp"
#include "qrb/detail/nelder_mead.hpp"

namespace qrb {

enum class CorrelationMode { kClassical, kQuantum };

struct CorrelationOptimum {
  double value = 0.0;
  std::array<double, 3> bloch_direction = {0.0, 0.0, 1.0};
  long long evaluations = 0;
};

/// Directional and symmetric readout correlation coefficients of a
/// two-qubit POVM.
struct CorrelationReport {
  double c_j_to_i = 0.0;  // conditioning qubit 1 -> affected qubit 0
  double c_i_to_j = 0.0;  // conditioning qubit 0 -> affected qubit 1
  double symmetric = 0.0;
  CorrelationMode mode = CorrelationMode::kClassical;
  CorrelationOptimum opt_j_to_i;
  CorrelationOptimum opt_i_to_j;
};

namespace detail {

/// Spectral norm of a 2x2 Hermitian matrix, in closed form.
inline double hermitian_2x2_norm(const Mat& a) {
  const double half_tr = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double half_diff = 0.5 * (a(0, 0).real() - a(1, 1).real());
  const double root = std::sqrt(half_diff * half_diff + std::norm(a(0, 1)));
  return std::max(std::abs(half_tr + root), std::abs(half_tr - root));
}

/// The conditional outcome-0 marginal is affine in the conditioning
/// state, so the difference over an antipodal pure-state pair with
/// Bloch direction u reduces to the fixed linear map
///   u -> u_x Phi(X) + u_y Phi(Y) + u_z Phi(Z)
/// evaluated here via the public conditional marginal on the six axis
/// states.
struct MarginalDifferenceMap {
  Mat phi_x, phi_y, phi_z;

  MarginalDifferenceMap(const Povm& m, int affected) {
    const auto at = [&](const DensityMatrix& sigma) { return conditional_marginal(m, affected, sigma)[0]; };
    phi_x = at(bloch_state(1, 0, 0)) - at(bloch_state(-1, 0, 0));
    phi_y = at(bloch_state(0, 1, 0)) - at(bloch_state(0, -1, 0));
    phi_z = at(bloch_state(0, 0, 1)) - at(bloch_state(0, 0, -1));
  }

  double norm_at(double ux, double uy, double uz) const {
    return hermitian_2x2_norm(Mat(ux * phi_x + uy * phi_y + uz * phi_z));
  }
};

inline std::vector<std::array<double, 3>> fibonacci_sphere(int n) {
  std::vector<std::array<double, 3>> pts;
  pts.reserve(static_cast<std::size_t>(n));
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return pts;
}

}  // namespace detail

/// c_{j->i}: supremum over conditioning-state pairs of the spectral
/// norm of the difference of the conditional outcome-0 effects.
/// Classical mode restricts to computational basis states; quantum mode
/// searches all pure states, reduced (by linearity and norm convexity)
/// to antipodal Bloch pairs: a Fibonacci-sphere scan refined by
/// Nelder-Mead on the sphere angles.
inline double correlation_coefficient(const Povm& m, int affected, int conditioning, CorrelationMode mode,
                                      CorrelationOptimum* diagnostics = nullptr) {
  if (m.dim() != 4 || m.n_outcomes() != 4)
    throw std::invalid_argument("correlation_coefficient: POVM must act on two qubits");
  if (affected == conditioning || affected < 0 || affected > 1 || conditioning < 0 || conditioning > 1)
    throw std::invalid_argument("correlation_coefficient: qubit indices must be {0, 1} in some order");

  const detail::MarginalDifferenceMap map(m, affected);
  long long evals = 0;

  if (mode == CorrelationMode::kClassical) {
    // The only nontrivial computational-basis pair is (|0><0|, |1><1|),
    // whose Bloch difference is the z axis.
    ++evals;
    const double value = map.norm_at(0, 0, 1);
    if (diagnostics) *diagnostics = CorrelationOptimum{value, {0, 0, 1}, evals};
    return value;
  }

  // Coarse grid (plus the coordinate axes so quantum >= classical holds
  // exactly), then local refinement.
  double best = -1.0;
  std::array<double, 3> best_u = {0, 0, 1};
  auto consider = [&](const std::array<double, 3>& u) {
    ++evals;
    const double v = map.norm_at(u[0], u[1], u[2]);
    if (v > best) {
      best = v;
      best_u = u;
    }
  };
  consider({1, 0, 0});
  consider({0, 1, 0});
  consider({0, 0, 1});
  for (const auto& u : detail::fibonacci_sphere(800)) consider(u);

  const double theta0 = std::acos(std::clamp(best_u[2], -1.0, 1.0));
  const double phi0 = std::atan2(best_u[1], best_u[0]);
  auto objective = [&](const std::vector<double>& angles) {
    const double st = std::sin(angles[0]);
    return -map.norm_at(st * std::cos(angles[1]), st * std::sin(angles[1]), std::cos(angles[0]));
  };
  const auto refined = detail::nelder_mead(objective, {theta0, phi0}, 0.08, 1e-6, 400);
  evals += refined.evaluations;
  if (-refined.value > best) {
    best = -refined.value;
    const double st = std::sin(refined.x[0]);
    best_u = {st * std::cos(refined.x[1]), st * std::sin(refined.x[1]), std::cos(refined.x[0])};
  }
  if (diagnostics) *diagnostics = CorrelationOptimum{best, best_u, evals};
  return best;
}

/// Both directions plus the symmetric average (c_{j->i} + c_{i->j})/2.
inline CorrelationReport symmetric_correlation(const Povm& m, CorrelationMode mode) {
  CorrelationReport rep;
  rep.mode = mode;
  rep.c_j_to_i = correlation_coefficient(m, 0, 1, mode, &rep.opt_j_to_i);
  rep.c_i_to_j = correlation_coefficient(m, 1, 0, mode, &rep.opt_i_to_j);
  rep.symmetric = 0.5 * (rep.c_j_to_i + rep.c_i_to_j);
  return rep;
}

}  // namespace qrb
