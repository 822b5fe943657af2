#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmrpm/rational.hpp"

namespace qmrpm {

/// A located disagreement: where it happened and the two values compared.
struct Witness {
  std::string where;
  std::string expected;
  std::string actual;
};

/// Outcome of one verification. Exact checks pass iff max_discrepancy == 0; statistical
/// checks additionally carry the largest |z| observed.
struct CheckReport {
  std::string check;
  std::vector<std::pair<std::string, std::string>> inputs;
  bool pass = true;
  Rational max_discrepancy = 0;
  std::vector<Witness> witnesses;
  std::optional<double> max_abs_z;
  std::size_t comparisons = 0;
  std::chrono::nanoseconds wall_time{0};

  static constexpr std::size_t kMaxWitnesses = 16;

  void add_input(std::string key, std::string value) {
    inputs.emplace_back(std::move(key), std::move(value));
  }

  /// Records one exact comparison. Nonzero differences fail the report and are kept as
  /// witnesses (up to kMaxWitnesses).
  void compare(const std::string& where, const Rational& expected, const Rational& actual);

  /// Records a failure that is not a numeric mismatch (e.g. a row defined on one side only).
  void fail(std::string where, std::string expected, std::string actual,
            const Rational& discrepancy = 1);

  /// Folds another report's comparisons and witnesses into this one.
  void absorb(const CheckReport& other, const std::string& prefix = {});
};

/// Measures wall time of a callable into report.wall_time.
template <class F>
CheckReport timed(F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckReport r = body();
  r.wall_time = std::chrono::steady_clock::now() - start;
  return r;
}

}  // namespace qmrpm
