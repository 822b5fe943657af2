#include "qmrpm/report.hpp"

namespace qmrpm {

void CheckReport::compare(const std::string& where, const Rational& expected,
                          const Rational& actual) {
  ++comparisons;
  const Rational d = abs_diff(expected, actual);
  if (d == 0) return;
  pass = false;
  if (d > max_discrepancy) max_discrepancy = d;
  if (witnesses.size() < kMaxWitnesses) {
    witnesses.push_back({where, to_string(expected), to_string(actual)});
  }
}

void CheckReport::fail(std::string where, std::string expected, std::string actual,
                       const Rational& discrepancy) {
  ++comparisons;
  pass = false;
  if (discrepancy > max_discrepancy) max_discrepancy = discrepancy;
  if (witnesses.size() < kMaxWitnesses) {
    witnesses.push_back({std::move(where), std::move(expected), std::move(actual)});
  }
}

void CheckReport::absorb(const CheckReport& other, const std::string& prefix) {
  comparisons += other.comparisons;
  if (!other.pass) pass = false;
  if (other.max_discrepancy > max_discrepancy) max_discrepancy = other.max_discrepancy;
  if (other.max_abs_z && (!max_abs_z || *other.max_abs_z > *max_abs_z)) max_abs_z = other.max_abs_z;
  for (const auto& w : other.witnesses) {
    if (witnesses.size() >= kMaxWitnesses) break;
    witnesses.push_back({prefix.empty() ? w.where : prefix + " " + w.where, w.expected, w.actual});
  }
}

}  // namespace qmrpm
