#pragma once

// Prior models, the exact joint-table oracle, the Monte Carlo sampler and the
// consistency checks that tie models to their kernels.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qmrpm/distribution.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/measure.hpp"
#include "qmrpm/regions.hpp"
#include "qmrpm/report.hpp"

namespace qmrpm {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct DirichletModel {
  Measure alpha;
};

struct EmpiricalFixedModel {
  Measure p0;
  unsigned N;
};

struct EmpiricalDirichletModel {
  Measure alpha;
  unsigned N;
};

class RpmModel {
 public:
  using Variant = std::variant<DirichletModel, EmpiricalFixedModel, EmpiricalDirichletModel>;

  static RpmModel dirichlet(Measure alpha);
  static RpmModel empirical_fixed(Measure p0, unsigned N);
  static RpmModel empirical_dirichlet(Measure alpha, unsigned N);

  const Variant& variant() const noexcept { return v_; }
  const SampleSpace& space() const;
  /// "dirichlet", "empirical-fixed" or "empirical-dirichlet".
  std::string kind() const;
  /// False only for the Dirichlet variant.
  bool finite_latent() const noexcept;
  /// Number of latent draws; ValidationError for the Dirichlet variant.
  unsigned draws() const;
  /// P0 for empirical-fixed, alpha otherwise.
  const Measure& measure() const;

 private:
  explicit RpmModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// One latent configuration: an opaque key (e.g. the ordered draws), the induced mass of
/// every atom, and its prior probability.
struct Latent {
  std::vector<std::size_t> key;
  std::vector<Rational> atom_mass;
  Rational weight;
};

/// Exact joint law of (latent configuration, X_1..X_n) where, given the latent, the X_i
/// are i.i.d. with the latent atom masses. Only positive-probability entries are stored.
class JointTable {
 public:
  struct Entry {
    std::size_t latent;
    std::vector<std::size_t> obs;
    Rational prob;
  };

  /// Expands latents with every observation tuple. Latents with zero weight are dropped.
  /// ResourceError when latents x atoms^n exceeds `budget`. With jobs > 1 the expansion
  /// is split across threads; the result is identical to the sequential one.
  static JointTable from_latents(SampleSpace space, std::vector<Latent> latents, std::size_t n,
                                 std::uint64_t budget = kDefaultBudget, unsigned jobs = 1);

  const SampleSpace& space() const noexcept { return space_; }
  std::size_t n() const noexcept { return n_; }
  const std::vector<Latent>& latents() const noexcept { return latents_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// P_A under a latent configuration.
  Rational mass(std::size_t latent, const RegionSet& region) const;
  Rational mass(const Entry& e, const RegionSet& region) const { return mass(e.latent, region); }

  /// P(X = x).
  Rational observation_probability(const std::vector<std::size_t>& x) const;

 private:
  JointTable() = default;
  SampleSpace space_{std::vector<std::string>{"_"}};
  std::size_t n_ = 0;
  std::vector<Latent> latents_;
  std::vector<Entry> entries_;
};

/// Latent configurations of a finite-latent model: ordered N-tuples of atoms with i.i.d.
/// P0 weights, or Polya-urn weights for the Dirichlet-driven variant.
std::vector<Latent> enumerate_latents(const RpmModel& model, std::uint64_t budget = kDefaultBudget);

/// ValidationError for the Dirichlet variant (no finite latent space).
JointTable enumerate_joint(const RpmModel& model, std::size_t n,
                           std::uint64_t budget = kDefaultBudget, unsigned jobs = 1);

/// E[prod_i P_{A_i}] for a nonempty list of factors.
Rational mixed_moment(const RpmModel& model, const std::vector<RegionSet>& factors);

/// E[prod_a P_a^{k_a}] for a Dirichlet(alpha) vector: prod_a alpha_a^[k_a] / alpha(X)^[K].
Rational dirichlet_atom_moment(const Measure& alpha, const std::vector<unsigned>& exponents);

using EntryPredicate = std::function<bool(const JointTable::Entry&)>;
using EntryStatistic = std::function<std::vector<Rational>(const JointTable::Entry&)>;

/// Conditional law of `statistic` given `condition`. UndefinedConditional when the
/// condition has probability zero.
JointLaw conditional_table(const JointTable& table, const EntryPredicate& condition,
                           const EntryStatistic& statistic);

/// Prior kernel of a model between two nested regions: identity for B1 = B2, otherwise
/// the scaled-Beta, empirical or Polya kernel.
Kernel prior_kernel(const RpmModel& model, const RegionSet& b1, const RegionSet& b2);

/// Kernels of `model` over every nested pair of `regions`.
TransitionSystem build_transition_system(const RpmModel& model, const std::vector<RegionSet>& regions);

/// Monte Carlo event counts. Event names are "P<region>=<value>" for latent statistics
/// and "X=(<labels>)" for observation tuples.
struct SampleFrequencies {
  std::uint64_t reps = 0;
  std::map<std::string, std::uint64_t> counts;
};

/// Draws `reps` realizations of (P, X_1..X_n). The streams are split into fixed blocks,
/// each seeded from (seed, block index), so results depend only on the seed.
/// `regions` selects the latent statistics recorded (ignored for the Dirichlet variant).
SampleFrequencies sample_paths(const RpmModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t reps, const std::vector<RegionSet>& regions,
                               unsigned jobs = 1);

/// Compares every tracked event frequency with its exact oracle probability; passes when
/// each |z| <= 3 (events of probability 0 or 1 must match exactly).
CheckReport verify_monte_carlo(const RpmModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t reps, const std::vector<RegionSet>& regions,
                               std::uint64_t budget = kDefaultBudget, unsigned jobs = 1);

/// C1: the cell law of the chain partition matches the closed-form multinomial or
/// Dirichlet-multinomial law, and every grouping of consecutive cells pushes it forward to
/// the law of the unions. C3: the law of each Y_i given the history depends only on the
/// prefix sum and equals the model kernel.
CheckReport verify_c1_c3(const RpmModel& model, const std::vector<RegionSet>& chain,
                         std::uint64_t budget = kDefaultBudget);

/// Conditional-independence property of an increasing chain. `path` is the joint law of
/// (Z_1..Z_k); the chain is extended with Z_0 = 0 and Z_{k+1} = 1. For 0 <= s < t <= k+1,
/// checks that the law of (Z_{s+1}..Z_{t-1}) given all outside variables equals its law
/// given (Z_s, Z_t), at every positive outside configuration.
CheckReport check_markov_sandwich(const JointLaw& path, std::size_t s, std::size_t t);

}  // namespace qmrpm
