#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qrb/noise/sampling.hpp"

namespace qrb {

/// Per-qubit assignment fidelities F_q = (p(0|0) + p(1|1))/2 plus their
/// mean and product across qubits.
struct AssignmentFidelity {
  std::vector<double> per_qubit;
  double mean = 0.0;
  double product = 0.0;
};

/// Computes assignment fidelities from counts of computational-basis
/// preparations measured in the computational basis. State tags must be
/// the prepared bitstrings; outcomes are marginalized over all other
/// qubits, and every qubit needs both of its preparations covered.
inline AssignmentFidelity assignment_fidelity(const ShotCounts& counts, int n_qubits) {
  counts.validate();
  if (counts.n_settings() != 1) throw std::invalid_argument("assignment_fidelity: expected a single Z-basis setting");
  const auto n_out = counts.n_outcomes();
  if (n_out != (std::size_t(1) << n_qubits)) throw std::invalid_argument("assignment_fidelity: outcome count mismatch");

  AssignmentFidelity result;
  result.per_qubit.resize(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) {
    // correct[b] / total[b]: probability of reading bit b given the
    // qubit was prepared in b, pooled over the other qubits.
    double correct[2] = {0, 0}, total[2] = {0, 0};
    for (std::size_t s = 0; s < counts.n_states(); ++s) {
      const std::string& tag = counts.states[s];
      if (tag.size() != static_cast<std::size_t>(n_qubits)) throw std::invalid_argument("assignment_fidelity: state tag '" + tag + "' is not a preparation bitstring");
      const int prepared = tag[static_cast<std::size_t>(q)] == '1' ? 1 : 0;
      for (std::size_t i = 0; i < n_out; ++i) {
        const int read = (i >> (n_qubits - 1 - q)) & 1;
        const auto c = static_cast<double>(counts.counts[0][s][i]);
        total[prepared] += c;
        if (read == prepared) correct[prepared] += c;
      }
    }
    if (total[0] <= 0 || total[1] <= 0)
      throw std::invalid_argument("assignment_fidelity: qubit " + std::to_string(q) + " is missing preparation data");
    result.per_qubit[static_cast<std::size_t>(q)] = 0.5 * (correct[0] / total[0] + correct[1] / total[1]);
  }

  result.mean = 0.0;
  result.product = 1.0;
  for (double f : result.per_qubit) {
    result.mean += f / static_cast<double>(n_qubits);
    result.product *= f;
  }
  return result;
}

}  // namespace qrb
