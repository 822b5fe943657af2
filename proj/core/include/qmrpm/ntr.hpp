#pragma once

// Neutral-to-the-right structure: normalized increments, increment-law families, finite
// NTR chain priors and their posteriors.

#include <map>
#include <utility>
#include <vector>

#include "qmrpm/distribution.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/models.hpp"
#include "qmrpm/posterior.hpp"
#include "qmrpm/regions.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

/// Law F_{B1B2} of V_{B1B2}: support within [0,1], total mass one.
using IncrementLaw = Distribution;

/// ValidationError unless `law` is a valid increment law.
void require_increment_law(const IncrementLaw& law);

/// (z2 - z1)/(1 - z1) for z1 < 1, and 1 at z1 = 1. ValidationError if z2 < z1 or either
/// value lies outside [0,1].
Rational v_statistic(const Rational& z1, const Rational& z2);

/// z1 -> law of z1 + (1 - z1) V with V ~ F; z1 = 1 maps to delta_1.
Kernel kernel_from_F(const IncrementLaw& f);

/// Law of V_{B1B2} under the kernel row at z1 < 1. ValidationError at z1 = 1.
IncrementLaw increment_law_at(const Kernel& kernel, const Rational& z1);

/// Increment laws indexed by nested region pairs.
class FSystem {
 public:
  using Pair = std::pair<RegionSet, RegionSet>;

  void set(const RegionSet& b1, const RegionSet& b2, IncrementLaw law);
  bool has(const RegionSet& b1, const RegionSet& b2) const;
  const IncrementLaw& at(const RegionSet& b1, const RegionSet& b2) const;
  std::vector<Pair> pairs() const;
  std::vector<std::array<RegionSet, 3>> triples() const;

 private:
  std::map<Pair, IncrementLaw> family_;
};

/// F_{B1B3} against the law of Y + Z - YZ for independent Y ~ F_{B1B2}, Z ~ F_{B2B3}.
CheckReport check_ntr_system(const FSystem& fs, const RegionSet& b1, const RegionSet& b2, const RegionSet& b3);

/// Law of V_{B1B2} from the oracle, plus an exact test of its independence from the
/// vector (P_A : A in the collection, A within B1).
struct ExtractedF {
  IncrementLaw law;
  CheckReport independence;
};
ExtractedF extract_F_from_model(const JointTable& table, const IndexingCollection& collection,
                                const RegionSet& b1, const RegionSet& b2);

/// A finite NTR prior along a chain B_1 within ... within B_k: P_{B_1} = V_1 and
/// P_{B_j} = P_{B_{j-1}} + (1 - P_{B_{j-1}}) V_j with independent V_j ~ increments[j-1].
/// Observations land in the cells C_1..C_{k+1}, which form the sample space.
struct NtrChainPrior {
  std::vector<IncrementLaw> increments;

  std::size_t length() const noexcept { return increments.size(); }
  /// Atoms "C1".."C{k+1}".
  SampleSpace cell_space() const;
  /// B_j = {C_1..C_j} for j = 0..k+1 (B_0 empty, B_{k+1} the whole space).
  std::vector<RegionSet> regions(const SampleSpace& cells) const;
};

void validate_ntr_prior(const NtrChainPrior& prior);

/// Exact joint table of (V_1..V_k, X_1..X_n) over the cell space.
JointTable enumerate_ntr_joint(const NtrChainPrior& prior, std::size_t n,
                               std::uint64_t budget = kDefaultBudget);

/// Prior F-system over every nested pair of the chain regions, by convolving increments.
FSystem prior_f_system(const NtrChainPrior& prior, const SampleSpace& cells);

/// Posterior law of V_{B1B2} given X = x, by conditioning the oracle.
IncrementLaw posterior_increment_law(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                     const ObservationVector& x);

/// Over the chain regions (empty set, B_1..B_k, whole space), from the oracle:
/// (i) every posterior kernel row at z1 is the pushforward of F^(x) under v -> z1 + (1-z1) v;
/// (ii) F^(x) is closed under the y + z - yz convolution on every triple;
/// (iii) F^(x)_{B_iB_j} is unchanged when observations inside B_i move within B_i, and equals
/// the prior F when all observations lie in B_i (or n = 0);
/// (iv) the posterior increments V_1..V_k are mutually independent.
CheckReport verify_ntr_posterior(const NtrChainPrior& prior, const ObservationVector& x,
                                 std::uint64_t budget = kDefaultBudget);

/// Posterior law of V_{B1B2} by reweighting the prior joint law of (V_{B1B2}, P_{B2}) with
/// (1 - P_{B2})^m, m = number of observations outside B2. Requires every x_i outside
/// B2 \ B1 (ValidationError otherwise); UndefinedConditional for a zero normalizer.
/// With B1 empty this is the posterior law of P_{B2} for observations outside B2.
IncrementLaw posterior_outside(const JointTable& prior_table, const RegionSet& b1, const RegionSet& b2,
                               const ObservationVector& x);

/// posterior_outside against posterior_increment_law on a table built for n = x.size().
CheckReport verify_outside_formula(const JointTable& prior_table, const JointTable& table,
                                   const RegionSet& b1, const RegionSet& b2, const ObservationVector& x);

}  // namespace qmrpm
