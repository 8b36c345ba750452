#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/sampling.hpp"

namespace qrb {

enum class Estimator { kMle, kBme };

inline std::string estimator_name(Estimator e) { return e == Estimator::kMle ? "mle" : "bme"; }

struct QstConfig {
  Estimator estimator = Estimator::kMle;
  int max_iterations = 5000;
  double convergence_tol = 1e-10;  // max-entry change between iterates
  double dilution = 0.5;           // epsilon of the diluted R rho R step
  int bme_chain_length = 10000;
  int bme_burn_in = 1000;
  double bme_proposal_scale = 0.1;
  bool bme_tune_proposal = true;  // adapt the scale during burn-in only
  int bme_prior_rank = 0;         // Ginibre prior rank; 0 = full rank

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("QstConfig: max_iterations must be >= 1");
    if (convergence_tol <= 0) throw std::invalid_argument("QstConfig: convergence_tol must be positive");
    if (dilution <= 0.0 || dilution > 1.0) throw std::invalid_argument("QstConfig: dilution must be in (0, 1]");
    if (bme_burn_in < 0 || bme_chain_length <= bme_burn_in)
      throw std::invalid_argument("QstConfig: chain length must exceed burn-in");
    if (bme_proposal_scale <= 0.0 || bme_proposal_scale >= 1.0)
      throw std::invalid_argument("QstConfig: bme_proposal_scale must be in (0, 1)");
    if (bme_prior_rank < 0) throw std::invalid_argument("QstConfig: bme_prior_rank must be >= 0");
  }
};

struct QstResult {
  DensityMatrix rho;
  int iterations = 0;
  double log_likelihood = 0.0;  // normalized: sum_i f_i log p_i
  bool converged = false;
  double bme_acceptance = -1.0;
  double bme_final_scale = -1.0;
};

namespace detail {

/// Measurement model pooled over settings: effect list plus per-outcome
/// weights f_i (counts divided by the grand total). The per-setting
/// multinomial factors of the likelihood enter as one product because
/// the setting weights cancel inside the f_i/p_i ratios.
struct PooledData {
  std::vector<Mat> effects;
  std::vector<double> f;       // normalized frequencies, sum to 1
  std::vector<double> counts;  // raw counts (for posterior sampling)
  Eigen::Index dim = 0;
};

inline PooledData pool_settings(const std::vector<Povm>& povms, const std::vector<std::vector<double>>& per_setting,
                                bool allow_empty = false) {
  if (povms.empty() || per_setting.size() != povms.size())
    throw std::invalid_argument("qst: counts/povm setting mismatch");
  PooledData out;
  out.dim = povms.front().dim();
  double total = 0.0;
  for (std::size_t b = 0; b < povms.size(); ++b) {
    if (povms[b].dim() != out.dim) throw std::invalid_argument("qst: POVM dimension mismatch across settings");
    if (per_setting[b].size() != povms[b].n_outcomes())
      throw std::invalid_argument("qst: outcome count mismatch in setting " + std::to_string(b));
    for (std::size_t i = 0; i < per_setting[b].size(); ++i) {
      const double v = per_setting[b][i];
      if (v < 0) throw std::invalid_argument("qst: negative count");
      out.effects.push_back(povms[b].effect(i));
      out.counts.push_back(v);
      total += v;
    }
  }
  if (total <= 0 && !allow_empty) throw std::invalid_argument("qst: all-zero counts");
  out.f.resize(out.counts.size());
  for (std::size_t i = 0; i < out.counts.size(); ++i) out.f[i] = total > 0 ? out.counts[i] / total : 0.0;
  return out;
}

inline PooledData pool_settings(const ShotCounts& counts, const std::vector<Povm>& povms) {
  counts.validate();
  if (counts.n_states() != 1) throw std::invalid_argument("qst: expected counts for exactly one state");
  std::vector<std::vector<double>> per_setting(counts.n_settings());
  for (std::size_t b = 0; b < counts.n_settings(); ++b) {
    per_setting[b].reserve(counts.n_outcomes());
    for (long long c : counts.counts[b][0]) per_setting[b].push_back(static_cast<double>(c));
  }
  return pool_settings(povms, per_setting);
}

inline double qst_log_likelihood(const PooledData& data, const Mat& rho) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.effects.size(); ++i) {
    if (data.f[i] <= 0.0) continue;
    const double p = (rho.cwiseProduct(data.effects[i].transpose())).sum().real();
    ll += data.f[i] * std::log(std::max(p, 1e-300));
  }
  return ll;
}

inline Mat qst_r_operator(const PooledData& data, const Mat& rho) {
  Mat r = Mat::Zero(data.dim, data.dim);
  for (std::size_t i = 0; i < data.effects.size(); ++i) {
    if (data.f[i] <= 0.0) continue;
    const double p = (rho.cwiseProduct(data.effects[i].transpose())).sum().real();
    r += (data.f[i] / std::max(p, 1e-12)) * data.effects[i];
  }
  return hermitize(r);
}

inline QstResult qst_mle_impl(const PooledData& data, const QstConfig& cfg) {
  Mat rho = Mat::Identity(data.dim, data.dim) / double(data.dim);
  double ll = qst_log_likelihood(data, rho);
  int iterations = 0;
  bool converged = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    ++iterations;
    const Mat r = qst_r_operator(data, rho);
    Mat rrr = hermitize(r * rho * r);
    const double tr = rrr.trace().real();
    if (!(tr > 0)) throw std::runtime_error("qst_mle: degenerate iterate");
    rrr /= tr;

    // Diluted step with a monotonicity guard: shrink epsilon until the
    // likelihood does not decrease (the unmixed direction is an ascent
    // direction, so this terminates).
    double eps = cfg.dilution;
    Mat next;
    double ll_new = 0.0;
    for (int attempt = 0; attempt < 48; ++attempt) {
      next = (1.0 - eps) * rho + eps * rrr;
      next = hermitize(next) / next.trace().real();
      ll_new = qst_log_likelihood(data, next);
      if (ll_new >= ll - 1e-12) break;
      eps *= 0.5;
    }
    if (ll_new < ll - 1e-9) throw std::runtime_error("qst_mle: log-likelihood decreased beyond tolerance");

    const double delta = max_abs(Mat(next - rho));
    rho = std::move(next);
    ll = ll_new;
    if (delta < cfg.convergence_tol) {
      converged = true;
      break;
    }
  }

  QstResult res{DensityMatrix(repair_psd_roundoff(rho)), iterations, ll, converged, -1.0, -1.0};
  return res;
}

inline QstResult qst_bme_impl(const PooledData& data, const QstConfig& cfg, RandomSource rng) {
  const Eigen::Index dim = data.dim;
  const Eigen::Index rank = cfg.bme_prior_rank == 0 ? dim : std::min<Eigen::Index>(cfg.bme_prior_rank, dim);
  auto draw_ginibre = [&](RandomSource& r) {
    Mat g(dim, rank);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = r.complex_gaussian();
    return g;
  };
  auto rho_of = [&](const Mat& g) {
    Mat rho = g * g.adjoint();
    return Mat(rho / rho.trace().real());
  };
  // Log-likelihood with raw counts: the posterior over the Ginibre
  // factor is prior x likelihood, and the preconditioned Crank-Nicolson
  // proposal is reversible for the Gaussian prior, so the acceptance
  // ratio is exactly the likelihood ratio.
  auto log_lik = [&](const Mat& rho) {
    double ll = 0.0;
    for (std::size_t i = 0; i < data.effects.size(); ++i) {
      if (data.counts[i] <= 0.0) continue;
      const double p = (rho.cwiseProduct(data.effects[i].transpose())).sum().real();
      ll += data.counts[i] * std::log(std::max(p, 1e-300));
    }
    if (!std::isfinite(ll)) throw std::runtime_error("qst_bme: non-finite likelihood");
    return ll;
  };

  Mat g = draw_ginibre(rng);
  Mat rho = rho_of(g);
  double ll = log_lik(rho);

  double beta = cfg.bme_proposal_scale;
  Mat mean = Mat::Zero(dim, dim);
  long long retained = 0;
  long long accepted_post = 0, proposed_post = 0;
  int accepted_window = 0, window = 0;

  for (int step = 0; step < cfg.bme_chain_length; ++step) {
    const Mat xi = draw_ginibre(rng);
    const Mat g_new = std::sqrt(1.0 - beta * beta) * g + beta * xi;
    const Mat rho_new = rho_of(g_new);
    const double ll_new = log_lik(rho_new);
    const bool in_burn_in = step < cfg.bme_burn_in;
    const double u = rng.uniform();
    const bool accept = std::log(std::max(u, 1e-300)) < ll_new - ll;
    if (accept) {
      g = g_new;
      rho = rho_new;
      ll = ll_new;
    }
    if (in_burn_in) {
      accepted_window += accept ? 1 : 0;
      ++window;
      if (cfg.bme_tune_proposal && window == 100) {
        const double rate = accepted_window / 100.0;
        if (rate < 0.2) beta = std::max(beta * 0.7, 1e-3);
        if (rate > 0.4) beta = std::min(beta * 1.3, 0.999);
        accepted_window = 0;
        window = 0;
      }
    } else {
      accepted_post += accept ? 1 : 0;
      ++proposed_post;
      mean += rho;
      ++retained;
    }
  }

  mean = hermitize(mean / double(retained));
  mean /= mean.trace().real();
  QstResult res{DensityMatrix(repair_psd_roundoff(mean)), cfg.bme_chain_length,
                qst_log_likelihood(data, mean), true,
                proposed_post > 0 ? double(accepted_post) / double(proposed_post) : 0.0, beta};
  return res;
}

}  // namespace detail

/// Maximum-likelihood state estimate under the adapted likelihood: the
/// product over (setting, outcome) pairs of Tr(rho M_i)^{n_i},
/// maximized by the diluted iteration
///   rho <- N[(1 - eps) rho + eps R rho R],  R = sum_i (f_i/p_i) M_i.
inline QstResult qst_mle(const ShotCounts& counts, const std::vector<Povm>& povms, const QstConfig& cfg) {
  cfg.validate();
  return detail::qst_mle_impl(detail::pool_settings(counts, povms), cfg);
}

/// Exact-frequency variant: values[setting][outcome] are probabilities
/// or unnormalized weights (e.g. Born probabilities times setting
/// weights).
inline QstResult qst_mle(const std::vector<std::vector<double>>& values, const std::vector<Povm>& povms,
                         const QstConfig& cfg) {
  cfg.validate();
  return detail::qst_mle_impl(detail::pool_settings(povms, values), cfg);
}

/// Bayesian mean estimate: posterior mean of rho under the adapted
/// likelihood and a full-rank Ginibre prior, sampled by a Metropolis
/// random walk in the Ginibre factor.
inline QstResult qst_bme(const ShotCounts& counts, const std::vector<Povm>& povms, const QstConfig& cfg,
                         const RandomSource& rng) {
  cfg.validate();
  counts.validate();
  if (counts.n_states() != 1) throw std::invalid_argument("qst_bme: expected counts for exactly one state");
  std::vector<std::vector<double>> per_setting(counts.n_settings());
  for (std::size_t b = 0; b < counts.n_settings(); ++b)
    for (long long c : counts.counts[b][0]) per_setting[b].push_back(static_cast<double>(c));
  // Zero data is allowed here: the chain then samples the prior.
  return detail::qst_bme_impl(detail::pool_settings(povms, per_setting, /*allow_empty=*/true), cfg, rng.derive(0));
}

}  // namespace qrb
