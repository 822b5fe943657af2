#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qmrpm/measure.hpp"
#include "qmrpm/rational.hpp"
#include "qmrpm/regions.hpp"

namespace testing_support {

using qmrpm::Rational;

inline Rational q(long p, long d = 1) { return qmrpm::make_rational(p, d); }

inline qmrpm::SampleSpace numbered_space(std::size_t atoms) {
  std::vector<std::string> labels;
  for (std::size_t a = 1; a <= atoms; ++a) labels.push_back(std::to_string(a));
  return qmrpm::build_space(std::move(labels));
}

inline qmrpm::RegionSet region(const qmrpm::SampleSpace& space, std::vector<std::string> labels) {
  return qmrpm::RegionSet::from_labels(space, labels);
}

/// The chain {1} within {1,2} within ... within the whole space, preceded by the empty set.
inline std::vector<qmrpm::RegionSet> prefix_regions(const qmrpm::SampleSpace& space) {
  std::vector<qmrpm::RegionSet> out{qmrpm::RegionSet::empty(space)};
  for (std::size_t k = 1; k <= space.size(); ++k) out.emplace_back(space, (std::uint64_t{1} << k) - 1);
  return out;
}

inline std::vector<oracle::Q> weights(const qmrpm::Measure& m) { return m.weights(); }

/// Seeded generator of small random instances.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Strictly positive weights summing to one, with denominators dividing `den`.
  std::vector<Rational> probability_vector(std::size_t k, long den) {
    std::vector<long> parts(k, 1);
    for (long left = den - static_cast<long>(k); left > 0; --left) ++parts[index(k)];
    std::vector<Rational> out;
    for (const long p : parts) out.push_back(q(p, den));
    return out;
  }

  /// Positive rational weights p/d with p in [1, 4] and d in [1, 3].
  std::vector<Rational> positive_weights(std::size_t k) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(q(integer(1, 4), integer(1, 3)));
    return out;
  }

  /// Finite law on [0,1) with support drawn from multiples of 1/den (1 excluded unless
  /// allow_one) and positive masses.
  std::map<Rational, Rational> increment_law(std::size_t max_support, long den, bool allow_one = false) {
    const std::size_t size = 1 + index(max_support);
    std::map<Rational, Rational> law;
    while (law.size() < size) {
      const long hi = allow_one ? den : den - 1;
      law[q(integer(0, hi), den)] = 0;
    }
    const auto probs = probability_vector(law.size(), 12);
    std::size_t i = 0;
    for (auto& [v, p] : law) p = probs[i++];
    return law;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
