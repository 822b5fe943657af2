#include "qmrpm/compare.hpp"

namespace qmrpm {

namespace {

template <class Law, class Describe>
void compare_maps(CheckReport& report, const std::string& where, const Law& expected,
                  const Law& actual, Describe describe_key) {
  auto ie = expected.begin();
  auto ia = actual.begin();
  const Rational zero = 0;
  while (ie != expected.end() || ia != actual.end()) {
    if (ia == actual.end() || (ie != expected.end() && ie->first < ia->first)) {
      report.compare(where + " at " + describe_key(ie->first), ie->second, zero);
      ++ie;
    } else if (ie == expected.end() || ia->first < ie->first) {
      report.compare(where + " at " + describe_key(ia->first), zero, ia->second);
      ++ia;
    } else {
      report.compare(where + " at " + describe_key(ie->first), ie->second, ia->second);
      ++ie;
      ++ia;
    }
  }
}

}  // namespace

void compare_distributions(CheckReport& report, const std::string& where,
                           const Distribution& expected, const Distribution& actual) {
  compare_maps(report, where, expected, actual, [](const Rational& v) { return to_string(v); });
}

void compare_joint_laws(CheckReport& report, const std::string& where, const JointLaw& expected,
                        const JointLaw& actual) {
  compare_maps(report, where, expected, actual,
               [](const std::vector<Rational>& v) { return describe(v); });
}

}  // namespace qmrpm
