#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/core/matrix.hpp"
#include "qrb/core/state.hpp"

namespace qrb {

/// Default outcome labels: bitstrings with qubit 0 as the most
/// significant bit, e.g. dim 4 -> "00", "01", "10", "11".
inline std::vector<std::string> bitstring_labels(Eigen::Index n_outcomes, int n_bits) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n_outcomes));
  for (Eigen::Index i = 0; i < n_outcomes; ++i) {
    std::string s(static_cast<std::size_t>(n_bits), '0');
    for (int b = 0; b < n_bits; ++b)
      if ((i >> (n_bits - 1 - b)) & 1) s[static_cast<std::size_t>(b)] = '1';
    labels.push_back(std::move(s));
  }
  return labels;
}

/// Ordered list of measurement effects: each Hermitian and PSD, summing
/// to the identity. Validated on construction at the POVM tolerances.
class Povm {
 public:
  Povm(std::vector<Mat> effects, std::vector<std::string> outcome_labels)
      : effects_(std::move(effects)), labels_(std::move(outcome_labels)) {
    if (effects_.empty()) throw std::invalid_argument("Povm: no effects");
    if (labels_.size() != effects_.size()) throw std::invalid_argument("Povm: outcome_labels length must match effects");
    const Eigen::Index dim = effects_.front().rows();
    Mat sum = Mat::Zero(dim, dim);
    for (const Mat& e : effects_) {
      if (e.rows() != dim || e.cols() != dim) throw std::invalid_argument("Povm: effects have mismatched dimensions");
      if (!is_hermitian(e, kPovmTol)) throw std::invalid_argument("Povm: effect is not Hermitian");
      if (hermitian_eigenvalues(e).minCoeff() < -kPovmTol)
        throw std::invalid_argument("Povm: effect is not positive semidefinite");
      sum += e;
    }
    if (max_abs(Mat(sum - Mat::Identity(dim, dim))) > kPovmTol)
      throw std::invalid_argument("Povm: effects do not sum to the identity");
  }

  explicit Povm(std::vector<Mat> effects)
      : Povm(relabel(std::move(effects))) {}

  const std::vector<Mat>& effects() const { return effects_; }
  const Mat& effect(std::size_t i) const { return effects_.at(i); }
  const std::vector<std::string>& outcome_labels() const { return labels_; }
  std::size_t n_outcomes() const { return effects_.size(); }
  Eigen::Index dim() const { return effects_.front().rows(); }

 private:
  static Povm relabel(std::vector<Mat> effects) {
    int bits = 0;
    if (!effects.empty()) {
      for (Eigen::Index d = static_cast<Eigen::Index>(effects.size()); d > 1; d >>= 1) ++bits;
      if ((std::size_t(1) << bits) != effects.size()) bits = 0;
    }
    const auto n = static_cast<Eigen::Index>(effects.size());
    std::vector<std::string> labels;
    if (bits > 0) {
      labels = bitstring_labels(n, bits);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    return Povm(std::move(effects), std::move(labels));
  }

  std::vector<Mat> effects_;
  std::vector<std::string> labels_;
};

/// p_i = Tr(rho M_i). Entries within [-1e-9, 0) are clamped to zero;
/// anything more negative signals an invalid state/POVM pair.
inline std::vector<double> born_probabilities(const DensityMatrix& rho, const Povm& m) {
  if (rho.dim() != m.dim()) throw std::invalid_argument("born_probabilities: dimension mismatch");
  std::vector<double> p;
  p.reserve(m.n_outcomes());
  double sum = 0.0;
  for (const Mat& e : m.effects()) {
    double v = (rho.matrix().cwiseProduct(e.transpose())).sum().real();
    if (v < -1e-9) throw std::runtime_error("born_probabilities: negative probability beyond tolerance");
    v = std::min(1.0, std::max(0.0, v));
    p.push_back(v);
    sum += v;
  }
  if (std::abs(sum - 1.0) > kPovmTol) throw std::runtime_error("born_probabilities: probabilities do not sum to 1");
  return p;
}

inline std::vector<double> born_probabilities(const PureState& psi, const Povm& m) {
  return born_probabilities(density_of(psi), m);
}

/// Conditional marginal of a two-qubit POVM: for each outcome x of the
/// kept qubit, sums Tr_j(M_{x x_j} (1 (x) sigma)) over the outcomes x_j
/// of the other qubit. Outcome index convention: label bit 0 is qubit 0.
inline std::vector<Mat> conditional_marginal(const Povm& m, int keep, const DensityMatrix& sigma) {
  if (m.dim() != 4 || m.n_outcomes() != 4) throw std::invalid_argument("conditional_marginal: POVM must act on two qubits");
  if (sigma.dim() != 2) throw std::invalid_argument("conditional_marginal: sigma must be single-qubit");
  if (keep != 0 && keep != 1) throw std::invalid_argument("conditional_marginal: keep must be 0 or 1");
  const int traced = 1 - keep;
  const Mat weight = keep == 0 ? tensor_product(identity(2), sigma.matrix())
                               : tensor_product(sigma.matrix(), identity(2));
  std::vector<Mat> out(2, Mat::Zero(2, 2));
  for (std::size_t idx = 0; idx < 4; ++idx) {
    const int bit_keep = keep == 0 ? (int(idx) >> 1) & 1 : int(idx) & 1;
    out[static_cast<std::size_t>(bit_keep)] += partial_trace_qubit(Mat(m.effect(idx) * weight), 2, traced);
  }
  for (Mat& e : out) e = hermitize(e);
  return out;
}

}  // namespace qrb
