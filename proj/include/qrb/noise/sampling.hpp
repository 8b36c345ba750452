#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"

namespace qrb {

/// Outcome histograms per (measurement setting, prepared state) cell.
struct ShotCounts {
  std::vector<std::string> settings;      // e.g. "XZ"
  std::vector<std::string> states;        // state tags, e.g. "t3" or "target"
  std::vector<std::string> outcomes;      // outcome labels, e.g. "00".."11"
  // counts[setting][state][outcome]
  std::vector<std::vector<std::vector<long long>>> counts;

  std::size_t n_settings() const { return settings.size(); }
  std::size_t n_states() const { return states.size(); }
  std::size_t n_outcomes() const { return outcomes.size(); }

  long long cell_total(std::size_t setting, std::size_t state) const {
    long long t = 0;
    for (long long c : counts.at(setting).at(state)) t += c;
    return t;
  }

  long long total() const {
    long long t = 0;
    for (std::size_t b = 0; b < counts.size(); ++b)
      for (std::size_t s = 0; s < counts[b].size(); ++s) t += cell_total(b, s);
    return t;
  }

  void validate() const {
    if (counts.size() != settings.size()) throw std::invalid_argument("ShotCounts: counts/settings mismatch");
    for (const auto& per_setting : counts) {
      if (per_setting.size() != states.size()) throw std::invalid_argument("ShotCounts: counts/states mismatch");
      for (const auto& cell : per_setting) {
        if (cell.size() != outcomes.size()) throw std::invalid_argument("ShotCounts: counts/outcomes mismatch");
        for (long long c : cell)
          if (c < 0) throw std::invalid_argument("ShotCounts: negative count");
      }
    }
  }

  /// Adds another block of counts cell-by-cell (same shape required).
  void add(const ShotCounts& other) {
    if (other.counts.size() != counts.size()) throw std::invalid_argument("ShotCounts::add: shape mismatch");
    for (std::size_t b = 0; b < counts.size(); ++b) {
      if (other.counts[b].size() != counts[b].size()) throw std::invalid_argument("ShotCounts::add: shape mismatch");
      for (std::size_t s = 0; s < counts[b].size(); ++s)
        for (std::size_t i = 0; i < counts[b][s].size(); ++i) counts[b][s][i] += other.counts[b][s][i];
    }
  }
};

/// Draws shots_per_cell multinomial outcomes for every (state, setting)
/// cell. Cells use seeds derived from (rng, cell index), so results do
/// not depend on evaluation order.
inline ShotCounts sample_counts(const std::vector<DensityMatrix>& states, const std::vector<std::string>& state_tags,
                                const std::vector<Povm>& povms, const std::vector<std::string>& setting_labels,
                                long long shots_per_cell, const RandomSource& rng) {
  if (shots_per_cell < 1) throw std::invalid_argument("sample_counts: shots_per_cell must be >= 1");
  if (states.size() != state_tags.size()) throw std::invalid_argument("sample_counts: states/tags mismatch");
  if (povms.size() != setting_labels.size()) throw std::invalid_argument("sample_counts: povms/labels mismatch");
  if (states.empty() || povms.empty()) throw std::invalid_argument("sample_counts: empty input");

  ShotCounts out;
  out.settings = setting_labels;
  out.states = state_tags;
  out.outcomes = povms.front().outcome_labels();
  out.counts.resize(povms.size());
  for (std::size_t b = 0; b < povms.size(); ++b) {
    out.counts[b].resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto p = born_probabilities(states[s], povms[b]);
      RandomSource cell_rng = rng.derive(b * states.size() + s);
      out.counts[b][s] = cell_rng.multinomial(shots_per_cell, p);
    }
  }
  return out;
}

inline ShotCounts sample_counts(const std::vector<PureState>& states, const std::vector<std::string>& state_tags,
                                const std::vector<Povm>& povms, const std::vector<std::string>& setting_labels,
                                long long shots_per_cell, const RandomSource& rng) {
  std::vector<DensityMatrix> rhos;
  rhos.reserve(states.size());
  for (const PureState& s : states) rhos.push_back(density_of(s));
  return sample_counts(rhos, state_tags, povms, setting_labels, shots_per_cell, rng);
}

/// Frequencies normalized over the whole block: f[setting][state][i] =
/// n / total.
inline std::vector<std::vector<std::vector<double>>> frequencies(const ShotCounts& counts) {
  const double total = static_cast<double>(counts.total());
  if (total <= 0) throw std::invalid_argument("frequencies: no counts");
  std::vector<std::vector<std::vector<double>>> f(counts.counts.size());
  for (std::size_t b = 0; b < counts.counts.size(); ++b) {
    f[b].resize(counts.counts[b].size());
    for (std::size_t s = 0; s < counts.counts[b].size(); ++s) {
      f[b][s].resize(counts.counts[b][s].size());
      for (std::size_t i = 0; i < counts.counts[b][s].size(); ++i)
        f[b][s][i] = static_cast<double>(counts.counts[b][s][i]) / total;
    }
  }
  return f;
}

}  // namespace qrb
