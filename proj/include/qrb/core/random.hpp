#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qrb {

/// Deterministic random source. All draws go through hand-rolled
/// transforms on top of std::mt19937_64 (whose output sequence is fixed
/// by the standard), so identical seeds give identical sequences on any
/// platform. Single-owner: concurrent work must split streams with
/// derive().
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Child source with an independent stream. Deterministic in
  /// (seed, stream); chain derive() calls for nested scopes.
  RandomSource derive(std::uint64_t stream) const {
    return RandomSource(mix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  /// n draws from the categorical distribution p (need not be exactly
  /// normalized; renormalized internally). Linear CDF walk per draw --
  /// outcome counts in this artifact are at most 2^3.
  std::vector<long long> multinomial(long long n, const std::vector<double>& p) {
    if (p.empty()) throw std::invalid_argument("multinomial: empty probability vector");
    double total = 0.0;
    for (double v : p) {
      if (v < 0.0) throw std::invalid_argument("multinomial: negative probability");
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("multinomial: zero total probability");
    std::vector<long long> counts(p.size(), 0);
    const std::size_t last = p.size() - 1;
    for (long long s = 0; s < n; ++s) {
      const double u = uniform() * total;
      double acc = 0.0;
      std::size_t k = last;
      for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) {
          k = i;
          break;
        }
      }
      ++counts[k];
    }
    return counts;
  }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qrb
