#pragma once

#include <vector>

#include "qmrpm/rational.hpp"
#include "qmrpm/regions.hpp"

namespace qmrpm {

/// Nonnegative rational weight on each atom of a SampleSpace (a base probability P0 or a
/// Dirichlet parameter measure alpha).
class Measure {
 public:
  /// Throws ValidationError for a size mismatch or a negative weight.
  Measure(SampleSpace space, std::vector<Rational> weights);

  static Measure uniform(const SampleSpace& space, const Rational& weight_per_atom);

  const SampleSpace& space() const noexcept { return space_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  const Rational& operator[](std::size_t atom) const { return weights_.at(atom); }

  Rational of(const RegionSet& region) const;
  Rational total() const;

  /// Throws ValidationError unless the weights sum to exactly one.
  void require_probability() const;
  /// Throws ValidationError unless the total mass is positive.
  void require_positive_total() const;

  /// This measure plus one unit of mass on each listed atom.
  Measure plus_point_masses(const std::vector<std::size_t>& atoms) const;

 private:
  SampleSpace space_;
  std::vector<Rational> weights_;
};

}  // namespace qmrpm
