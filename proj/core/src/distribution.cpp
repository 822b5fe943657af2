#include "qmrpm/distribution.hpp"

#include "qmrpm/errors.hpp"

namespace qmrpm {

void add_mass(Distribution& law, const Rational& value, const Rational& mass) {
  if (mass == 0) return;
  auto [it, inserted] = law.try_emplace(value, mass);
  if (!inserted) {
    it->second += mass;
    if (it->second == 0) law.erase(it);
  }
}

void add_mass(JointLaw& law, const std::vector<Rational>& key, const Rational& mass) {
  if (mass == 0) return;
  auto [it, inserted] = law.try_emplace(key, mass);
  if (!inserted) {
    it->second += mass;
    if (it->second == 0) law.erase(it);
  }
}

Rational total_mass(const Distribution& law) {
  Rational sum = 0;
  for (const auto& [v, p] : law) sum += p;
  return sum;
}

Rational total_mass(const JointLaw& law) {
  Rational sum = 0;
  for (const auto& [v, p] : law) sum += p;
  return sum;
}

Distribution normalized(Distribution law) {
  const Rational total = total_mass(law);
  if (total == 0) throw UndefinedConditional("conditioning on an event of probability zero");
  for (auto& [v, p] : law) p /= total;
  return law;
}

JointLaw normalized(JointLaw law) {
  const Rational total = total_mass(law);
  if (total == 0) throw UndefinedConditional("conditioning on an event of probability zero");
  for (auto& [v, p] : law) p /= total;
  return law;
}

Distribution point_mass(const Rational& value) { return Distribution{{value, Rational(1)}}; }

LawDifference compare_laws(const Distribution& lhs, const Distribution& rhs) {
  LawDifference out;
  auto consider = [&](const Rational& v, const Rational& d) {
    if (d > out.max_abs) {
      out.max_abs = d;
      out.at = v;
    }
  };
  auto a = lhs.begin();
  auto b = rhs.begin();
  while (a != lhs.end() || b != rhs.end()) {
    if (b == rhs.end() || (a != lhs.end() && a->first < b->first)) {
      consider(a->first, abs(a->second));
      ++a;
    } else if (a == lhs.end() || b->first < a->first) {
      consider(b->first, abs(b->second));
      ++b;
    } else {
      consider(a->first, abs_diff(a->second, b->second));
      ++a;
      ++b;
    }
  }
  return out;
}

Distribution marginal(const JointLaw& law, std::size_t index) {
  Distribution out;
  for (const auto& [key, p] : law) add_mass(out, key.at(index), p);
  return out;
}

std::string describe(const Distribution& law) {
  std::string s = "{";
  bool first = true;
  for (const auto& [v, p] : law) {
    if (!first) s += ", ";
    first = false;
    s += to_string(v) + ": " + to_string(p);
  }
  return s + "}";
}

std::string describe(const std::vector<Rational>& values) {
  std::string s = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += to_string(values[i]);
  }
  return s + ")";
}

}  // namespace qmrpm
