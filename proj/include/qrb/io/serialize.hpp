#pragma once

#include <json.hpp>

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/state.hpp"
#include "qrb/noise/sampling.hpp"

namespace qrb {

/// Matrix wire format: {dim, re, im} with flat row-major arrays.
/// Qubit 0 is the leftmost tensor factor / most significant bit.
inline nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json j;
  j["dim"] = m.rows();
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline Mat matrix_from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (dim < 1 || re.size() != static_cast<std::size_t>(dim * dim) || im.size() != re.size())
    throw std::invalid_argument("matrix_from_json: malformed matrix object");
  Mat m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) {
      const auto idx = static_cast<std::size_t>(r * dim + c);
      m(r, c) = Complex(re[idx], im[idx]);
    }
  return m;
}

inline nlohmann::json povm_to_json(const Povm& p) {
  nlohmann::json j;
  nlohmann::json effects = nlohmann::json::array();
  for (const Mat& e : p.effects()) effects.push_back(matrix_to_json(e));
  j["effects"] = std::move(effects);
  j["outcome_labels"] = p.outcome_labels();
  return j;
}

inline Povm povm_from_json(const nlohmann::json& j) {
  std::vector<Mat> effects;
  for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
  return Povm(std::move(effects), j.at("outcome_labels").get<std::vector<std::string>>());
}

inline nlohmann::json pure_state_to_json(const PureState& psi) {
  nlohmann::json j;
  std::vector<double> re, im;
  for (Eigen::Index i = 0; i < psi.dim(); ++i) {
    re.push_back(psi.amplitudes()(i).real());
    im.push_back(psi.amplitudes()(i).imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline PureState pure_state_from_json(const nlohmann::json& j) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() || re.empty()) throw std::invalid_argument("pure_state_from_json: malformed state");
  Vec amp(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) amp(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
  return PureState(std::move(amp));
}

/// Counts wire format with explicit setting strings, state tags and
/// outcome labels.
inline nlohmann::json counts_to_json(const ShotCounts& c) {
  nlohmann::json j;
  j["settings"] = c.settings;
  j["states"] = c.states;
  j["outcome_labels"] = c.outcomes;
  j["counts"] = c.counts;
  j["total_shots"] = c.total();
  return j;
}

inline ShotCounts counts_from_json(const nlohmann::json& j) {
  ShotCounts c;
  c.settings = j.at("settings").get<std::vector<std::string>>();
  c.states = j.at("states").get<std::vector<std::string>>();
  c.outcomes = j.at("outcome_labels").get<std::vector<std::string>>();
  c.counts = j.at("counts").get<std::vector<std::vector<std::vector<long long>>>>();
  c.validate();
  return c;
}

}  // namespace qrb
