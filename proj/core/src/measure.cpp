#include "qmrpm/measure.hpp"

#include "qmrpm/errors.hpp"

namespace qmrpm {

Measure::Measure(SampleSpace space, std::vector<Rational> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.size()) {
    throw ValidationError("measure has " + std::to_string(weights_.size()) +
                          " weights for a space of " + std::to_string(space_.size()) + " atoms");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] < 0) throw ValidationError("negative weight on atom '" + space_.label(i) + "'");
  }
}

Measure Measure::uniform(const SampleSpace& space, const Rational& weight_per_atom) {
  return Measure(space, std::vector<Rational>(space.size(), weight_per_atom));
}

Rational Measure::of(const RegionSet& region) const {
  if (!(region.space() == space_)) throw ValidationError("region over a different space");
  Rational sum = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (region.contains(i)) sum += weights_[i];
  }
  return sum;
}

Rational Measure::total() const {
  Rational sum = 0;
  for (const auto& w : weights_) sum += w;
  return sum;
}

void Measure::require_probability() const {
  if (total() != 1) throw ValidationError("probability vector sums to " + to_string(total()));
}

void Measure::require_positive_total() const {
  if (total() <= 0) throw ValidationError("measure has zero total mass");
}

Measure Measure::plus_point_masses(const std::vector<std::size_t>& atoms) const {
  std::vector<Rational> w = weights_;
  for (auto a : atoms) {
    if (a >= w.size()) throw ValidationError("atom index out of range");
    w[a] += 1;
  }
  return Measure(space_, std::move(w));
}

}  // namespace qmrpm
