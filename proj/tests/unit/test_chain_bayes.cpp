#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "qmrpm/chain_bayes.hpp"
#include "qmrpm/errors.hpp"

using namespace qmrpm;
using testing_support::q;

namespace {

Distribution law(std::initializer_list<std::pair<Rational, Rational>> items) {
  Distribution d;
  for (const auto& [v, p] : items) add_mass(d, v, p);
  return d;
}

const std::vector<Rational> kGrid{q(0), q(1, 4), q(1, 2), q(3, 4), q(1)};

Kernel grid_kernel(const std::map<Rational, Distribution>& rows) {
  std::vector<Rational> source;
  std::vector<std::vector<Rational>> dense;
  for (const auto& [y, row] : rows) {
    source.push_back(y);
    std::vector<Rational> r;
    for (const auto& z : kGrid) r.push_back(row.contains(z) ? row.at(z) : Rational(0));
    dense.push_back(r);
  }
  return Kernel::grid(source, kGrid, dense);
}

ChainSpec three_step_chain() {
  ChainSpec c;
  c.grid = kGrid;
  c.initial = law({{q(1, 4), q(1, 2)}, {q(1, 2), q(1, 2)}});
  c.kernels.push_back(grid_kernel({{q(1, 4), law({{q(1, 4), q(1, 3)}, {q(1, 2), q(1, 3)}, {q(1), q(1, 3)}})},
                                   {q(1, 2), law({{q(1, 2), q(1, 2)}, {q(3, 4), q(1, 2)}})}}));
  c.kernels.push_back(grid_kernel({{q(1, 4), law({{q(3, 4), q(1)}})},
                                   {q(1, 2), law({{q(1, 2), q(1, 4)}, {q(1), q(3, 4)}})},
                                   {q(3, 4), law({{q(3, 4), q(1, 2)}, {q(1), q(1, 2)}})},
                                   {q(1), law({{q(1), q(1)}})}}));
  return c;
}

std::vector<oracle::ChainKernel> oracle_kernels(const ChainSpec& c) {
  std::vector<oracle::ChainKernel> out;
  for (const auto& k : c.kernels) {
    oracle::ChainKernel ck;
    for (const auto& y : k.as_grid()->source) ck[y] = k.row(y);
    out.push_back(ck);
  }
  return out;
}

NeutralVector three_fractions() {
  return {{law({{q(0), q(1, 2)}, {q(1, 2), q(1, 2)}}), law({{q(0), q(1, 3)}, {q(1, 2), q(2, 3)}}),
           law({{q(1, 4), q(1, 2)}, {q(1), q(1, 2)}})}};
}

}  // namespace

TEST(ChainBayes, TwoPointWorkedValue) {
  ChainSpec c{{q(1, 4), q(3, 4)}, law({{q(1, 4), q(1, 2)}, {q(3, 4), q(1, 2)}}), {}};
  EXPECT_EQ(posterior_chain(c, 1).initial.at(q(3, 4)), q(3, 4));
  EXPECT_EQ(posterior_chain(c, 2).initial.at(q(3, 4)), q(1, 4));
  EXPECT_EQ(backward_alpha(c, 1).alpha, q(1, 2));
  EXPECT_EQ(backward_alpha(c, 2).alpha, q(1, 2));
}

TEST(ChainBayes, PathLawSumsToOne) {
  EXPECT_EQ(total_mass(path_law(three_step_chain())), 1);
}

TEST(ChainBayes, AlphasAreLabelProbabilities) {
  const ChainSpec c = three_step_chain();
  const JointLaw paths = path_law(c);
  for (std::size_t j = 1; j <= 4; ++j) {
    Rational expected = 0;
    for (const auto& [z, p] : paths) {
      const Rational hi = j <= 3 ? z[j - 1] : Rational(1);
      const Rational lo = j >= 2 ? z[j - 2] : Rational(0);
      expected += p * (hi - lo);
    }
    EXPECT_EQ(backward_alpha(c, j).alpha, expected) << "j=" << j;
    EXPECT_EQ(backward_alpha(c, j).functions.size(), j >= 2 ? j - 1 : 0U);
  }
}

TEST(ChainBayes, PosteriorChainMatchesPathEnumeration) {
  const ChainSpec c = three_step_chain();
  for (int j = 1; j <= 4; ++j) {
    if (backward_alpha(c, static_cast<std::size_t>(j)).alpha == 0) continue;
    const JointLaw expected = oracle::chain_conditional(c.initial, oracle_kernels(c), j);
    EXPECT_EQ(path_law(posterior_chain(c, static_cast<std::size_t>(j))), expected) << "j=" << j;
    EXPECT_EQ(conditional_path_law(c, static_cast<std::size_t>(j)), expected);
    EXPECT_TRUE(verify_chain_posterior(c, static_cast<std::size_t>(j)).pass);
  }
}

TEST(ChainBayes, LabelErrors) {
  const ChainSpec c = three_step_chain();
  EXPECT_THROW(posterior_chain(c, 0), ValidationError);
  EXPECT_THROW(posterior_chain(c, 5), ValidationError);
  ChainSpec at_zero{{q(0), q(1)}, law({{q(0), q(1)}}), {}};
  EXPECT_THROW(posterior_chain(at_zero, 1), UndefinedConditional);
}

TEST(ChainBayes, ValidationErrors) {
  EXPECT_THROW(validate_chain({{q(1, 2), q(1, 4)}, law({{q(1, 2), q(1)}}), {}}), ValidationError);
  EXPECT_THROW(validate_chain({{q(1, 4)}, law({{q(1, 2), q(1)}}), {}}), ValidationError);
  EXPECT_THROW(validate_chain({{}, {}, {}}), ValidationError);
  ChainSpec down{kGrid, law({{q(1, 2), q(1)}}), {grid_kernel({{q(1, 2), law({{q(1, 4), q(1)}})}})}};
  EXPECT_THROW(validate_chain(down), ValidationError);
  ChainSpec missing{kGrid, law({{q(1, 2), q(1)}}), {grid_kernel({{q(1, 4), law({{q(1, 4), q(1)}})}})}};
  EXPECT_THROW(validate_chain(missing), ValidationError);
}

TEST(ChainBayes, NeutralUpdateReweightsFractions) {
  const NeutralVector nv = three_fractions();
  const NeutralVector up = neutral_update(nv, 2);
  // F_2 reweighted by v: mass 2/3 at 1/2 only.
  EXPECT_EQ(up.laws[1], law({{q(1, 2), q(1)}}));
  // F_1 reweighted by 1 - v: {0: 1/2, 1/2: 1/4} normalized.
  EXPECT_EQ(up.laws[0], law({{q(0), q(2, 3)}, {q(1, 2), q(1, 3)}}));
  EXPECT_EQ(up.laws[2], nv.laws[2]);
  const NeutralVector last = neutral_update(nv, 4);
  EXPECT_EQ(last.laws[2], law({{q(1, 4), q(1)}}));
}

TEST(ChainBayes, NeutralUpdateAgreesWithChainPosterior) {
  const NeutralVector nv = three_fractions();
  const ChainSpec chain = chain_from_neutral(nv);
  for (std::size_t j = 1; j <= 4; ++j) {
    EXPECT_TRUE(verify_neutral_update(nv, j).pass) << "j=" << j;
    EXPECT_TRUE(verify_chain_posterior(chain, j).pass) << "j=" << j;
  }
}

TEST(ChainBayes, NeutralUpdateZeroMeanIsUndefined) {
  const NeutralVector nv{{law({{q(0), q(1)}}), law({{q(1, 2), q(1)}})}};
  EXPECT_THROW(neutral_update(nv, 1), UndefinedConditional);
  EXPECT_THROW(neutral_update({}, 1), ValidationError);
}

TEST(ChainBayes, CorruptedClaimFails) {
  const ChainSpec c = three_step_chain();
  ChainSpec claimed = posterior_chain(c, 2);
  claimed.initial = law({{q(1, 4), q(1, 2)}, {q(1, 2), q(1, 2)}});
  const auto r = compare_chain_posterior(c, 2, claimed);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.witnesses.empty());
  EXPECT_TRUE(compare_chain_posterior(c, 2, posterior_chain(c, 2)).pass);
}
