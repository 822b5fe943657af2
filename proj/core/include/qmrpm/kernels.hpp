#pragma once

// Transition kernels on [0,1] and transition systems indexed by nested regions.
//
// A kernel Q_{B1B2}(z1; .) gives the law of P_{B2} given P_{B1} = z1. Discrete kernels
// expose rows as Distributions; scaled-Beta kernels (and their compositions) are only
// accessible through the moments E[(1 - V)^k] of the normalized increment
// V = (P_{B2} - z1) / (1 - z1).

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qmrpm/distribution.hpp"
#include "qmrpm/measure.hpp"
#include "qmrpm/rational.hpp"
#include "qmrpm/regions.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

struct IdentityKernel {};

/// Partial kernel on a finite grid. Rows exist exactly at `source` points; querying any
/// other point is an UndefinedConditional error.
struct GridKernel {
  std::vector<Rational> source;
  std::vector<Rational> target;
  std::vector<std::vector<Rational>> rows;  // rows[i][t] = Q(source[i]; {target[t]})

  std::optional<std::size_t> source_index(const Rational& z1) const;
};

/// Conditional on z1 < 1, (P_{B2} - z1)/(1 - z1) ~ Beta(a, b); z1 = 1 maps to delta_1.
/// a = 0 is the point mass at V = 0 and, failing that, b = 0 the point mass at V = 1.
struct ScaledBeta {
  Rational a;
  Rational b;
};

/// Composition of independent scaled-Beta steps; known only through its (1 - V) moments.
struct BetaChain {
  std::vector<ScaledBeta> factors;
};

/// z1 -> law of z1 + (1 - z1) V with V ~ increment; z1 = 1 maps to delta_1.
struct IncrementKernel {
  Distribution increment;
};

class Kernel {
 public:
  using Variant = std::variant<IdentityKernel, GridKernel, ScaledBeta, BetaChain, IncrementKernel>;

  Kernel() : v_(IdentityKernel{}) {}

  static Kernel identity() { return Kernel(IdentityKernel{}); }
  /// Validates sorted supports within [0,1], nonnegative entries and rows summing to one.
  static Kernel grid(std::vector<Rational> source, std::vector<Rational> target,
                     std::vector<std::vector<Rational>> rows);
  static Kernel scaled_beta(Rational a, Rational b);
  static Kernel beta_chain(std::vector<ScaledBeta> factors);
  /// Validates the increment law (support in [0,1], mass one).
  static Kernel increment(Distribution law);

  const Variant& variant() const noexcept { return v_; }
  const GridKernel* as_grid() const noexcept { return std::get_if<GridKernel>(&v_); }
  std::string kind() const;

  /// Identity, grid and increment kernels have rows.
  bool is_discrete() const noexcept;
  /// Everything except grid kernels is spatially homogeneous in V and has (1 - V) moments.
  bool has_increment_moments() const noexcept;

  bool defined_at(const Rational& z1) const;
  /// Law of P_{B2} given P_{B1} = z1. UndefinedConditional off a grid kernel's rows;
  /// ValidationError for Beta kernels.
  Distribution row(const Rational& z1) const;

  /// E[(1 - V)^k]. ValidationError for grid kernels.
  Rational one_minus_v_moment(unsigned k) const;

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// a (a+1) ... (a+k-1); k = 0 gives 1.
Rational rising_factorial(const Rational& a, unsigned k);

Rational binomial(unsigned n, unsigned k);

/// E[(1 - V)^k] for V ~ Beta(a, b) with the degenerate conventions of ScaledBeta.
Rational beta_one_minus_v_moment(const ScaledBeta& beta, unsigned k);

/// Kernel of the empirical measure of N i.i.d. draws from p0 on the grid {m/N}:
/// Q(m1/N; {m2/N}) = C(N-m1, m2-m1) p0(C)^(m2-m1) p0(B2^c)^(N-m2) / p0(B1^c)^(N-m1), C = B2 \ B1.
/// Rows exist only where P(N P_{B1} = m1) > 0.
Kernel empirical_kernel(const Measure& p0, unsigned N, const RegionSet& b1, const RegionSet& b2);

/// Kernel of the empirical measure of N draws from a Dirichlet process (Polya urn):
/// as empirical_kernel with powers replaced by rising factorials of alpha.
Kernel polya_kernel(const Measure& alpha, unsigned N, const RegionSet& b1, const RegionSet& b2);

/// Scaled-Beta kernel with a = alpha(B2 \ B1), b = alpha(B2^c).
Kernel dirichlet_kernel(const Measure& alpha, const RegionSet& b1, const RegionSet& b2);

/// Law of y + z - yz for independent y ~ first, z ~ second.
Distribution convolve_increments(const Distribution& first, const Distribution& second);

/// Law of z1 + (1 - z1) V for V ~ increment.
Distribution shift_increment(const Distribution& increment, const Rational& z1);

/// Grid kernels compose by exact matrix product; scaled-Beta kernels compose into a
/// BetaChain; increment kernels convolve their increments under y + z - yz.
/// ValidationError when K12 puts mass on a point where K23 has no row, or for
/// incompatible kinds.
Kernel compose_kernels(const Kernel& k12, const Kernel& k23);

/// Appends to `report` one comparison per (source point, target value), or per moment
/// order when either side is only known through moments.
void compare_kernels(CheckReport& report, const std::string& where, const Kernel& expected,
                     const Kernel& actual, unsigned moment_order = 4);

/// Family of kernels indexed by nested region pairs.
class TransitionSystem {
 public:
  using Pair = std::pair<RegionSet, RegionSet>;

  /// ValidationError unless b1 is within b2.
  void set(const RegionSet& b1, const RegionSet& b2, Kernel kernel);
  bool has(const RegionSet& b1, const RegionSet& b2) const;
  /// ValidationError when absent.
  const Kernel& at(const RegionSet& b1, const RegionSet& b2) const;

  std::vector<Pair> pairs() const;
  /// Every nested triple B1 within B2 within B3 whose three kernels are all present.
  std::vector<std::array<RegionSet, 3>> triples() const;

 private:
  std::map<Pair, Kernel> family_;
};

/// Chapman-Kolmogorov at one triple: compose(Q12, Q23) against Q13, exactly. Grid rows
/// are compared entrywise; Beta kernels through (1 - V) moments up to `moment_order`.
CheckReport check_chapman_kolmogorov(const TransitionSystem& system, const RegionSet& b1,
                                     const RegionSet& b2, const RegionSet& b3,
                                     unsigned moment_order = 4);

}  // namespace qmrpm
