#pragma once

// Increasing Markov chains on a rational grid observed through a size-biased label, and
// the completely-neutral special case.

#include <map>
#include <vector>

#include "qmrpm/distribution.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/ntr.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

/// Z_1 ~ initial, Z_i | Z_{i-1} ~ kernels[i-2] for i = 2..k, on a fixed grid; Z_0 = 0 and
/// Z_{k+1} = 1. The label X satisfies P(X = j | Z) = Z_j - Z_{j-1}.
struct ChainSpec {
  std::vector<Rational> grid;
  Distribution initial;
  std::vector<Kernel> kernels;

  std::size_t length() const noexcept { return kernels.size() + 1; }
};

/// Checks a sorted grid in [0,1], the initial law on the grid, grid kernels whose supports
/// lie on the grid, rows that only move upward, and rows at every reachable point.
void validate_chain(const ChainSpec& chain);

/// Joint law of (Z_1..Z_k).
JointLaw path_law(const ChainSpec& chain);

/// Function on grid points.
using GridFunction = std::map<Rational, Rational>;

/// alpha_i^(j) for i = 2..j (functions of Z_{i-1}; entry i-2 of `functions`) and the scalar
/// alpha_j = P(X = j). alpha_j^(j)(y) = E[Z_j - y | Z_{j-1} = y] for j <= k, and
/// alpha_{k+1}^(k+1)(y) = 1 - y; lower indices follow the backward recursion.
struct BackwardAlpha {
  std::vector<GridFunction> functions;
  Rational alpha;
};
BackwardAlpha backward_alpha(const ChainSpec& chain, std::size_t j);

/// Conditional chain given X = j: reweighted initial law and kernels. Rows are kept where
/// their normalizer is positive. UndefinedConditional if alpha_j = 0 or a posterior-reachable
/// point has no row.
ChainSpec posterior_chain(const ChainSpec& chain, std::size_t j);

/// Independent fractions V_1..V_k; Y_1 = V_1, Y_i = V_i prod_{l<i} (1 - V_l).
struct NeutralVector {
  std::vector<IncrementLaw> laws;
};

/// Posterior fractions given X = j: F_j reweighted by v, F_i by (1 - v) for i < j, others
/// unchanged; j = k+1 reweights every F_i by (1 - v). UndefinedConditional on a zero mean.
NeutralVector neutral_update(const NeutralVector& nv, std::size_t j);

/// The chain Z_i = Z_{i-1} + (1 - Z_{i-1}) V_i over its reachable grid.
ChainSpec chain_from_neutral(const NeutralVector& nv);

/// Conditional path law of the chain given X = j, by enumerating (Z_1..Z_k, X).
JointLaw conditional_path_law(const ChainSpec& chain, std::size_t j);

/// Compares the path law of `claimed` with the oracle conditional path law given X = j.
CheckReport compare_chain_posterior(const ChainSpec& chain, std::size_t j, const ChainSpec& claimed);

/// posterior_chain against the oracle, plus the sandwich property of the conditioned chain
/// for every bracket 0 <= s < t <= k+1 with t - s >= 2.
CheckReport verify_chain_posterior(const ChainSpec& chain, std::size_t j);

/// neutral_update read on the Z scale agrees with posterior_chain, and the updated
/// fractions are the oracle conditional law of (V_1..V_k) given X = j (a product law).
CheckReport verify_neutral_update(const NeutralVector& nv, std::size_t j);

}  // namespace qmrpm
