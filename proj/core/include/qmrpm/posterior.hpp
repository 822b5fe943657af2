#pragma once

// Posterior kernels given an observed sample, computed from the joint-table oracle, and
// the checks of the posterior Markov theorem and its companions.

#include <cstdint>
#include <vector>

#include "qmrpm/distribution.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/models.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

/// Observed atoms X_1..X_n as atom indices; order is kept.
using ObservationVector = std::vector<std::size_t>;

/// Q^(x)_{B1B2}: rows at every z1 with P(X = x, P_{B1} = z1) > 0.
struct PosteriorKernel {
  Kernel kernel;
  ObservationVector x;
  RegionSet b1;
  RegionSet b2;
};

std::string describe_observations(const SampleSpace& space, const ObservationVector& x);

/// Every observation vector of length n over the space, in lexicographic order.
std::vector<ObservationVector> all_observations(const SampleSpace& space, std::size_t n);

/// Exact conditioning of the oracle on {X = x, P_{B1} = z1}. The table must have been
/// built for n = x.size(). UndefinedConditional when P(X = x) = 0.
PosteriorKernel posterior_kernel(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                 const ObservationVector& x);
PosteriorKernel posterior_kernel(const RpmModel& model, const RegionSet& b1, const RegionSet& b2,
                                 const ObservationVector& x, std::uint64_t budget = kDefaultBudget);

/// mu^(x)_{B}: posterior law of P_B.
Distribution posterior_law(const JointTable& table, const RegionSet& b, const ObservationVector& x);

/// For every ν_{B1}-positive z1, product event A_1 x ... x A_n of nonempty atom sets and
/// target set Γ2, compares
///   sum_{x in Ã} Q^(x)(z1; Γ2) P(X = x | P_{B1} = z1)
/// with
///   sum_{z2 in Γ2} P(X in Ã | P_{B1} = z1, P_{B2} = z2) Q(z1; {z2}),
/// where Q is `prior` (the model's own kernel, not the oracle). At oracle-null (z1, z2)
/// the second factor uses P(X in Ã | P_{B1} = z1). Above `max_events` events per z1 the
/// check falls back to singleton events.
CheckReport verify_central_bayes(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                 const Kernel& prior, std::uint64_t max_events = 100'000);
CheckReport verify_central_bayes(const RpmModel& model, const RegionSet& b1, const RegionSet& b2,
                                 std::size_t n, std::uint64_t budget = kDefaultBudget);

/// (i) the posterior law of (P_{B1}..P_{Bk}) factorizes as mu^(x)_{B1} times the pairwise
/// posterior kernels; (ii) Q^(x)_{B_iB_l} = Q^(x)_{B_iB_j} composed with Q^(x)_{B_jB_l} for
/// every i < j < l; (iii) for every pair B_i within B_j, Q^(x)_{B_iB_j} is unchanged when the
/// coordinates of x inside B_i are moved within B_i, and equals the prior kernel when every
/// observation lies in B_i.
CheckReport verify_posterior_markov(const RpmModel& model, const std::vector<RegionSet>& chain,
                                    const ObservationVector& x, std::uint64_t budget = kDefaultBudget);
CheckReport verify_posterior_markov(const RpmModel& model, const JointTable& table,
                                    const std::vector<RegionSet>& chain, const ObservationVector& x);

/// Q^(x)(m1/N; {m2/N}) = Q'((m1 - δ_x(B1))/(N-1); {(m2 - δ_x(B2))/(N-1)}) where Q' is the
/// same family at sample size N - 1: the same P0 for the fixed-base model, and the Polya
/// kernel with parameter alpha + delta_x for the Dirichlet-driven model. Requires an
/// empirical model with N >= 2.
Kernel shifted_kernel_n1(const RpmModel& model, std::size_t x, const RegionSet& b1, const RegionSet& b2);

/// Compares shifted_kernel_n1 with the oracle posterior kernel at every oracle row.
/// InternalConsistencyError if the oracle has a row where the shifted kernel has none.
CheckReport verify_shift_n1(const RpmModel& model, std::size_t x, const RegionSet& b1,
                            const RegionSet& b2, std::uint64_t budget = kDefaultBudget);

/// For every atom multiset q of total order 1..max_order:
///   E[q(P) prod_i P_{x_i}] / E[prod_i P_{x_i}]  under Dirichlet(alpha)
/// equals E[q(P)] under Dirichlet(alpha + sum_i δ_{x_i}).
CheckReport dirichlet_posterior_check(const Measure& alpha, const ObservationVector& x,
                                      unsigned max_order = 4);

/// Posterior moment E[P_A | X = x] under Dirichlet(alpha), by the moment ratio.
Rational dirichlet_posterior_mean(const Measure& alpha, const ObservationVector& x, const RegionSet& a);

}  // namespace qmrpm
