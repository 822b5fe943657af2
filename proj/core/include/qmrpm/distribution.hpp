#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmrpm/rational.hpp"

namespace qmrpm {

/// A finitely supported law on the rationals: value -> probability.
/// Zero-probability values are never stored.
using Distribution = std::map<Rational, Rational>;

/// Joint law of a finite vector of rational statistics.
using JointLaw = std::map<std::vector<Rational>, Rational>;

void add_mass(Distribution& law, const Rational& value, const Rational& mass);
void add_mass(JointLaw& law, const std::vector<Rational>& key, const Rational& mass);

Rational total_mass(const Distribution& law);
Rational total_mass(const JointLaw& law);

/// Divides every mass by the total. Throws UndefinedConditional when the total is zero.
Distribution normalized(Distribution law);
JointLaw normalized(JointLaw law);

Distribution point_mass(const Rational& value);

/// E[f(V)] for V ~ law.
template <class F>
Rational expectation(const Distribution& law, F&& f) {
  Rational sum = 0;
  for (const auto& [v, p] : law) sum += p * Rational(f(v));
  return sum;
}

template <class F>
Distribution pushforward(const Distribution& law, F&& f) {
  Distribution out;
  for (const auto& [v, p] : law) add_mass(out, Rational(f(v)), p);
  return out;
}

/// Largest |P(v) - Q(v)| over the union of supports, together with the value attaining it
/// (the smallest such value when several tie).
struct LawDifference {
  Rational max_abs = 0;
  Rational at = 0;
};
LawDifference compare_laws(const Distribution& lhs, const Distribution& rhs);

/// Marginal of coordinate `index` of a joint law.
Distribution marginal(const JointLaw& law, std::size_t index);

/// "{v: p, ...}" with p/q text; used in witnesses.
std::string describe(const Distribution& law);
std::string describe(const std::vector<Rational>& values);

}  // namespace qmrpm
