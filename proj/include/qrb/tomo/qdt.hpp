#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/sampling.hpp"

namespace qrb {

struct QdtConfig {
  int max_iterations = 5000;
  double convergence_tol = 1e-10;  // max-entry change between iterates
  std::optional<Povm> initial_povm;
};

struct QdtResult {
  Povm povm;
  int iterations = 0;
  double log_likelihood = 0.0;  // normalized: sum_i f_i log p_i
  bool converged = false;
};

namespace detail {

inline double qdt_log_likelihood(const std::vector<std::vector<double>>& f, const std::vector<Mat>& rho,
                                 const std::vector<Mat>& effects) {
  double ll = 0.0;
  for (std::size_t s = 0; s < rho.size(); ++s)
    for (std::size_t i = 0; i < effects.size(); ++i) {
      if (f[s][i] <= 0.0) continue;
      const double p = (rho[s].cwiseProduct(effects[i].transpose())).sum().real();
      if (p < 1e-12) throw std::runtime_error("qdt_mle: observed outcome has vanishing model probability (data/model inconsistency)");
      ll += f[s][i] * std::log(p);
    }
  return ll;
}

/// Hermitian inverse square root with a relative eigenvalue floor.
inline Mat inverse_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  const double floor = std::max(es.eigenvalues().maxCoeff(), 0.0) * 1e-14 + 1e-300;
  Eigen::VectorXd inv = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Detector-tomography MLE. Frequencies f[state][outcome] may carry any
/// common normalization; calibration_states must span the operator
/// space (informational completeness is checked up front). Iterates
///   M_i <- lambda^{-1/2} R_i M_i R_i lambda^{-1/2},
///   R_i = sum_s (f_is / p_is) rho_s,  lambda = sum_i R_i M_i R_i,
/// which preserves Hermiticity, positivity and the identity sum. The
/// log-likelihood is monotone; if round-off ever breaks that, the step
/// is blended with the previous iterate until it does not.
inline QdtResult qdt_mle(const std::vector<std::vector<double>>& frequencies,
                         const std::vector<DensityMatrix>& calibration_states, const QdtConfig& cfg) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("qdt_mle: max_iterations must be >= 1");
  if (cfg.convergence_tol <= 0) throw std::invalid_argument("qdt_mle: convergence_tol must be positive");
  if (calibration_states.empty() || frequencies.size() != calibration_states.size())
    throw std::invalid_argument("qdt_mle: frequencies/states mismatch");
  const Eigen::Index dim = calibration_states.front().dim();
  const std::size_t n_outcomes = frequencies.front().size();
  if (n_outcomes < 2) throw std::invalid_argument("qdt_mle: need at least two outcomes");
  for (const auto& row : frequencies)
    if (row.size() != n_outcomes) throw std::invalid_argument("qdt_mle: ragged frequency table");

  std::vector<Mat> rho;
  rho.reserve(calibration_states.size());
  for (const auto& s : calibration_states) {
    if (s.dim() != dim) throw std::invalid_argument("qdt_mle: calibration state dimension mismatch");
    rho.push_back(s.matrix());
  }

  // Informational completeness: the vectorized states must have rank
  // dim^2.
  {
    Eigen::MatrixXcd frame(static_cast<Eigen::Index>(rho.size()), dim * dim);
    for (std::size_t s = 0; s < rho.size(); ++s)
      frame.row(static_cast<Eigen::Index>(s)) = Eigen::Map<const Vec>(rho[s].data(), dim * dim).transpose();
    Eigen::JacobiSVD<Mat> svd(frame);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > sv(0) * 1e-10) ++rank;
    if (rank < dim * dim)
      throw std::invalid_argument("qdt_mle: calibration states are not informationally complete (rank " +
                                  std::to_string(rank) + " < " + std::to_string(dim * dim) + ")");
  }

  std::vector<Mat> effects;
  if (cfg.initial_povm) {
    if (cfg.initial_povm->dim() != dim || cfg.initial_povm->n_outcomes() != n_outcomes)
      throw std::invalid_argument("qdt_mle: initial POVM shape mismatch");
    effects = cfg.initial_povm->effects();
  } else {
    effects.assign(n_outcomes, Mat(Mat::Identity(dim, dim) / double(n_outcomes)));
  }

  double ll = detail::qdt_log_likelihood(frequencies, rho, effects);
  int iterations = 0;
  bool converged = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    ++iterations;
    // R_i and the normalizer lambda.
    std::vector<Mat> r(n_outcomes, Mat::Zero(dim, dim));
    for (std::size_t s = 0; s < rho.size(); ++s)
      for (std::size_t i = 0; i < n_outcomes; ++i) {
        if (frequencies[s][i] <= 0.0) continue;
        const double p = (rho[s].cwiseProduct(effects[i].transpose())).sum().real();
        if (p < 1e-12) throw std::runtime_error("qdt_mle: observed outcome has vanishing model probability (data/model inconsistency)");
        r[i] += (frequencies[s][i] / p) * rho[s];
      }
    Mat lambda = Mat::Zero(dim, dim);
    for (std::size_t i = 0; i < n_outcomes; ++i) lambda += r[i] * effects[i] * r[i];
    const Mat lam_inv_sqrt = detail::inverse_sqrt(lambda);

    std::vector<Mat> updated(n_outcomes);
    for (std::size_t i = 0; i < n_outcomes; ++i)
      updated[i] = hermitize(lam_inv_sqrt * r[i] * effects[i] * r[i] * lam_inv_sqrt);

    // Monotonicity guard: blend toward the previous iterate on a
    // likelihood decrease (convexity keeps the blend a valid POVM).
    double ll_new = detail::qdt_log_likelihood(frequencies, rho, updated);
    for (int attempt = 0; attempt < 48 && ll_new < ll - 1e-12; ++attempt) {
      for (std::size_t i = 0; i < n_outcomes; ++i) updated[i] = 0.5 * (updated[i] + effects[i]);
      ll_new = detail::qdt_log_likelihood(frequencies, rho, updated);
    }
    if (ll_new < ll - 1e-9) throw std::runtime_error("qdt_mle: log-likelihood decreased beyond tolerance");

    double delta = 0.0;
    for (std::size_t i = 0; i < n_outcomes; ++i) delta = std::max(delta, max_abs(Mat(updated[i] - effects[i])));
    effects.swap(updated);
    ll = ll_new;
    if (delta < cfg.convergence_tol) {
      converged = true;
      break;
    }
  }

  for (Mat& e : effects) e = repair_psd_roundoff(e);
  return QdtResult{Povm(std::move(effects)), iterations, ll, converged};
}

/// Convenience entry point over sampled counts for one setting block.
inline QdtResult qdt_mle(const ShotCounts& counts, std::size_t setting,
                         const std::vector<DensityMatrix>& calibration_states, const QdtConfig& cfg) {
  counts.validate();
  if (setting >= counts.n_settings()) throw std::invalid_argument("qdt_mle: setting index out of range");
  std::vector<std::vector<double>> f(counts.n_states());
  double total = 0.0;
  for (std::size_t s = 0; s < counts.n_states(); ++s)
    for (long long c : counts.counts[setting][s]) total += static_cast<double>(c);
  if (total <= 0) throw std::invalid_argument("qdt_mle: no counts in setting block");
  for (std::size_t s = 0; s < counts.n_states(); ++s) {
    f[s].resize(counts.n_outcomes());
    for (std::size_t i = 0; i < counts.n_outcomes(); ++i)
      f[s][i] = static_cast<double>(counts.counts[setting][s][i]) / total;
  }
  return qdt_mle(f, calibration_states, cfg);
}

}  // namespace qrb
