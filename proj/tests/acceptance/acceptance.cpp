// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "qmrpm/chain_bayes.hpp"
#include "qmrpm/errors.hpp"
#include "qmrpm/json_io.hpp"
#include "qmrpm/ntr.hpp"
#include "qmrpm/posterior.hpp"

using namespace qmrpm;
using testing_support::Gen;
using testing_support::q;
using testing_support::region;

namespace {

/// Accumulates failures for one criterion.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  std::size_t checks() const { return checks_; }
  std::size_t failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string id;
  std::string title;
  double limit_seconds;
  std::function<void(Tally&)> body;
};

std::vector<int> to_ints(const ObservationVector& x) { return {x.begin(), x.end()}; }

std::vector<RegionSet> all_subsets(const SampleSpace& X) {
  std::vector<RegionSet> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << X.size()); ++bits) out.emplace_back(X, bits);
  return out;
}

std::vector<std::pair<RegionSet, RegionSet>> strict_pairs(const std::vector<RegionSet>& regions) {
  std::vector<std::pair<RegionSet, RegionSet>> out;
  for (const auto& a : regions) {
    for (const auto& b : regions) {
      if (a != b && a.subset_of(b)) out.emplace_back(a, b);
    }
  }
  return out;
}

/// Empirical models used throughout: fixed base and Polya-driven, uniform and skewed.
std::vector<RpmModel> finite_models(const SampleSpace& X, std::vector<unsigned> sizes) {
  std::vector<Rational> skew;
  for (std::size_t a = 0; a < X.size(); ++a) skew.push_back(q(static_cast<long>(a + 1)));
  Rational total = 0;
  for (const auto& w : skew) total += w;
  std::vector<Rational> p0;
  for (const auto& w : skew) p0.push_back(w / total);
  std::vector<RpmModel> out;
  for (const unsigned N : sizes) {
    out.push_back(RpmModel::empirical_fixed(Measure::uniform(X, q(1, static_cast<long>(X.size()))), N));
    out.push_back(RpmModel::empirical_fixed(Measure(X, p0), N));
    out.push_back(RpmModel::empirical_dirichlet(Measure::uniform(X, q(1)), N));
    out.push_back(RpmModel::empirical_dirichlet(Measure(X, {skew.begin(), skew.end()}), N));
  }
  return out;
}

std::vector<oracle::Outcome> outcomes_for(const RpmModel& m, int n) {
  const int N = static_cast<int>(m.draws());
  if (m.kind() == "empirical-fixed") return oracle::empirical_outcomes(m.measure().weights(), N, n);
  return oracle::urn_outcomes(m.measure().weights(), N, n);
}

std::string label(const RpmModel& m) { return m.kind() + " N=" + std::to_string(m.draws()); }

IncrementLaw law(std::initializer_list<std::pair<Rational, Rational>> items) {
  IncrementLaw d;
  for (const auto& [v, p] : items) add_mass(d, v, p);
  return d;
}

std::vector<NtrChainPrior> ntr_priors() {
  std::vector<NtrChainPrior> out{
      {{law({{q(1, 3), q(1, 2)}, {q(1), q(1, 2)}})}},
      {{law({{q(0), q(1, 2)}, {q(1, 2), q(1, 2)}}), law({{q(1, 4), q(1, 3)}, {q(1, 2), q(1, 3)}, {q(3, 4), q(1, 3)}})}},
      {{law({{q(1, 3), q(1, 2)}, {q(2, 3), q(1, 2)}}), law({{q(0), q(1, 4)}, {q(1, 2), q(3, 4)}}),
        law({{q(1, 5), q(1, 2)}, {q(1), q(1, 2)}})}},
  };
  Gen g(606);
  for (int i = 0; i < 6; ++i) {
    NtrChainPrior p;
    const std::size_t k = 1 + g.index(3);
    for (std::size_t j = 0; j < k; ++j) p.increments.push_back(g.increment_law(3, 5, j + 1 == k));
    out.push_back(p);
  }
  return out;
}

const std::vector<Rational> kGrid{q(0), q(1, 4), q(1, 2), q(3, 4), q(1)};

ChainSpec random_chain_spec(Gen& g, std::size_t length) {
  ChainSpec c;
  c.grid = kGrid;
  const auto w = g.probability_vector(2, 6);
  add_mass(c.initial, kGrid[g.index(2)], w[0]);
  add_mass(c.initial, kGrid[2 + g.index(2)], w[1]);
  for (std::size_t s = 1; s < length; ++s) {
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
      std::vector<Rational> row(kGrid.size(), Rational(0));
      const std::size_t span = kGrid.size() - i;
      const auto p = g.probability_vector(std::min<std::size_t>(span, 3), 6);
      row[i] += p[0];
      for (std::size_t e = 1; e < p.size(); ++e) row[i + 1 + g.index(span - 1)] += p[e];
      rows.push_back(row);
    }
    c.kernels.push_back(Kernel::grid(kGrid, kGrid, rows));
  }
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

// AC1
void chapman_kolmogorov(Tally& t) {
  const auto X = testing_support::numbered_space(3);
  const auto regions = testing_support::prefix_regions(X);
  for (const auto& m : finite_models(X, {2, 3})) {
    const TransitionSystem ts = build_transition_system(m, regions);
    for (const auto& chain : nested_chains(regions, 3, true)) {
      const auto r = check_chapman_kolmogorov(ts, chain[0], chain[1], chain[2]);
      t.expect(r.pass && r.max_discrepancy == 0, label(m) + " at " + chain[1].to_string());
    }
  }
}

// AC2
void kernel_vs_oracle(Tally& t) {
  for (std::size_t atoms = 2; atoms <= 4; ++atoms) {
    const auto X = testing_support::numbered_space(atoms);
    std::vector<std::vector<RegionSet>> collections{testing_support::prefix_regions(X)};
    if (atoms >= 3) {
      std::vector<RegionSet> members{region(X, {"1"}), region(X, {"1", "2"}), region(X, {"1", "3"})};
      if (atoms == 4) members.push_back(region(X, {"1", "2", "4"}));
      collections.push_back(union_closure(build_indexing_collection(X, members)));
    }
    for (const auto& m : finite_models(X, {1, 2, 3})) {
      const auto outcomes = outcomes_for(m, 0);
      for (const auto& regions : collections) {
        for (const auto& [b1, b2] : strict_pairs(regions)) {
          const Kernel k = m.kind() == "empirical-fixed" ? empirical_kernel(m.measure(), m.draws(), b1, b2)
                                                          : polya_kernel(m.measure(), m.draws(), b1, b2);
          for (const auto& z1 : oracle::positive_points(outcomes, b1.bits(), {})) {
            const bool ok = k.defined_at(z1) &&
                            k.row(z1) == oracle::conditional(outcomes, b1.bits(), z1, b2.bits(), {});
            t.expect(ok, label(m) + " " + b1.to_string() + "->" + b2.to_string());
          }
        }
      }
    }
  }
}

// AC3
void posterior_markov(Tally& t) {
  const auto X = testing_support::numbered_space(3);
  const auto subsets = all_subsets(X);
  std::vector<std::vector<RegionSet>> chains;
  for (std::size_t len = 2; len <= 4; ++len) {
    for (auto& c : nested_chains(subsets, len, true)) chains.push_back(std::move(c));
  }
  for (const auto& m : finite_models(X, {2, 3})) {
    for (std::size_t n = 0; n <= 2; ++n) {
      const JointTable table = enumerate_joint(m, n);
      for (const auto& x : all_observations(X, n)) {
        if (table.observation_probability(x) == 0) continue;
        for (const auto& chain : chains) {
          t.expect(verify_posterior_markov(m, table, chain, x).pass,
                   label(m) + " x=" + describe_observations(X, x) + " chain from " + chain.front().to_string());
        }
      }
    }
  }
}

// AC4
void shift_n1(Tally& t) {
  const auto X = testing_support::numbered_space(3);
  const auto pairs = strict_pairs(all_subsets(X));
  for (const auto& m : finite_models(X, {2, 3})) {
    const auto outcomes = outcomes_for(m, 1);
    for (std::size_t x = 0; x < X.size(); ++x) {
      for (const auto& [b1, b2] : pairs) {
        const Kernel shifted = shifted_kernel_n1(m, x, b1, b2);
        for (const auto& z1 : oracle::positive_points(outcomes, b1.bits(), {static_cast<int>(x)})) {
          const auto expected = oracle::conditional(outcomes, b1.bits(), z1, b2.bits(), {static_cast<int>(x)});
          t.expect(shifted.defined_at(z1) && shifted.row(z1) == expected,
                   label(m) + " x=" + X.label(x) + " " + b1.to_string() + "->" + b2.to_string());
        }
        t.expect(verify_shift_n1(m, x, b1, b2).pass, label(m) + " verify_shift_n1");
      }
    }
  }
  const auto ef = RpmModel::empirical_fixed(Measure::uniform(X, q(1, 3)), 2);
  const Kernel k = shifted_kernel_n1(ef, 1, region(X, {"1"}), region(X, {"1", "2"}));
  const Distribution row = k.row(q(0));
  t.expect(row.contains(q(1, 2)) && row.at(q(1, 2)) == q(1, 2), "worked value Q^(x=2)(0;{1/2}) = 1/2");
}

// AC5
void dirichlet_conjugacy(Tally& t) {
  for (const std::size_t atoms : {3, 4}) {
    const auto X = testing_support::numbered_space(atoms);
    const Measure alpha = Measure::uniform(X, q(1));
    for (std::size_t n = 0; n <= 2; ++n) {
      for (const auto& x : all_observations(X, n)) {
        t.expect(dirichlet_posterior_check(alpha, x, 4).pass, "moments x=" + describe_observations(X, x));
        // Posterior means against the urn: E[P_a prod P_{x_i}] / E[prod P_{x_i}].
        std::vector<int> base(atoms, 0);
        for (const auto a : x) ++base[a];
        for (std::size_t a = 0; a < atoms; ++a) {
          std::vector<int> up = base;
          ++up[a];
          const Rational expected = oracle::dirichlet_moment(alpha.weights(), up) /
                                    oracle::dirichlet_moment(alpha.weights(), base);
          const std::size_t atom[] = {a};
          t.expect(dirichlet_posterior_mean(alpha, x, RegionSet::from_atoms(X, atom)) == expected,
                   "mean of atom " + X.label(a) + " x=" + describe_observations(X, x));
        }
      }
    }
  }
  const auto X = testing_support::numbered_space(3);
  t.expect(dirichlet_posterior_mean(Measure::uniform(X, q(1)), {0}, region(X, {"1"})) == q(1, 2),
           "posterior mean (1+1)/(3+1) = 1/2");
}

// AC6
void ntr_posterior(Tally& t) {
  for (const auto& p : ntr_priors()) {
    const SampleSpace cells = p.cell_space();
    const auto rs = p.regions(cells);
    const std::vector<oracle::Law> incs(p.increments.begin(), p.increments.end());
    for (std::size_t n = 0; n <= 2; ++n) {
      const JointTable table = enumerate_ntr_joint(p, n);
      const auto outcomes = oracle::ntr_outcomes(incs, static_cast<int>(n));
      for (const auto& x : all_observations(cells, n)) {
        if (table.observation_probability(x) == 0) continue;
        const std::string where = "k=" + std::to_string(p.length()) + " x=" + describe_observations(cells, x);
        t.expect(verify_ntr_posterior(p, x).pass, where);
        for (std::size_t j = 1; j <= p.length(); ++j) {
          const IncrementLaw post = posterior_increment_law(table, rs[j - 1], rs[j], x);
          t.expect(post == oracle::ntr_posterior_increment(outcomes, j - 1, to_ints(x)), where + " V" + std::to_string(j));
          const bool inside = std::all_of(x.begin(), x.end(), [&](std::size_t a) { return rs[j - 1].contains(a); });
          if (inside) t.expect(post == p.increments[j - 1], where + " in-B1 F unchanged");
        }
      }
    }
  }
}

// AC7
void outside_formulas(Tally& t) {
  for (const auto& p : ntr_priors()) {
    const SampleSpace cells = p.cell_space();
    const auto rs = p.regions(cells);
    const std::vector<oracle::Law> incs(p.increments.begin(), p.increments.end());
    const JointTable prior = enumerate_ntr_joint(p, 0);
    for (std::size_t n = 1; n <= 2; ++n) {
      const JointTable table = enumerate_ntr_joint(p, n);
      const auto outcomes = oracle::ntr_outcomes(incs, static_cast<int>(n));
      for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
          for (const auto& x : all_observations(cells, n)) {
            const bool qualifies = std::none_of(x.begin(), x.end(), [&](std::size_t a) {
              return rs[j].contains(a) && !rs[i].contains(a);
            });
            if (!qualifies || table.observation_probability(x) == 0) continue;
            const std::string where = "k=" + std::to_string(p.length()) + " B" + std::to_string(i) + "->B" +
                                      std::to_string(j) + " x=" + describe_observations(cells, x);
            t.expect(verify_outside_formula(prior, table, rs[i], rs[j], x).pass, where);
            if (j == i + 1 && j <= p.length()) {
              t.expect(posterior_outside(prior, rs[i], rs[j], x) ==
                           oracle::ntr_posterior_increment(outcomes, i, to_ints(x)),
                       where + " vs product oracle");
            }
          }
        }
      }
    }
  }
  // Empirical models: one observation outside B gives the posterior law of P_B.
  const auto X = testing_support::numbered_space(3);
  const RegionSet empty = RegionSet::empty(X);
  for (const auto& m : finite_models(X, {2, 3})) {
    const JointTable prior = enumerate_joint(m, 0);
    const auto outcomes = outcomes_for(m, 1);
    for (const auto& b : all_subsets(X)) {
      if (b.is_empty() || b == RegionSet::full(X)) continue;
      for (const auto x : b.complement().atoms()) {
        const auto expected = oracle::conditional(outcomes, 0, q(0), b.bits(), {static_cast<int>(x)});
        t.expect(posterior_outside(prior, empty, b, {x}) == expected,
                 label(m) + " B=" + b.to_string() + " x=" + X.label(x));
      }
    }
  }
  const auto ef = RpmModel::empirical_fixed(Measure::uniform(X, q(1, 3)), 2);
  const IncrementLaw worked = posterior_outside(enumerate_joint(ef, 0), empty, region(X, {"1"}), {1});
  t.expect(worked == law({{q(0), q(2, 3)}, {q(1, 2), q(1, 3)}}), "worked value 2/3");
}

// AC8
void chain_posterior(Tally& t) {
  Gen g(808);
  std::vector<ChainSpec> specs;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (int i = 0; i < 6; ++i) specs.push_back(random_chain_spec(g, k));
  }
  for (const auto& c : specs) {
    validate_chain(c);
    for (std::size_t j = 1; j <= c.length() + 1; ++j) {
      if (backward_alpha(c, j).alpha == 0) continue;
      const std::string where = "k=" + std::to_string(c.length()) + " j=" + std::to_string(j);
      const JointLaw expected = oracle::chain_conditional(c.initial, oracle_kernels(c), static_cast<int>(j));
      t.expect(path_law(posterior_chain(c, j)) == expected, where + " vs oracle");
      t.expect(verify_chain_posterior(c, j).pass, where);
    }
  }
  for (int i = 0; i < 12; ++i) {
    NeutralVector nv;
    const std::size_t k = 1 + g.index(4);
    for (std::size_t j = 0; j < k; ++j) nv.laws.push_back(g.increment_law(2, 4, true));
    const ChainSpec c = chain_from_neutral(nv);
    for (std::size_t j = 1; j <= k + 1; ++j) {
      if (backward_alpha(c, j).alpha == 0) continue;
      t.expect(verify_neutral_update(nv, j).pass, "neutral k=" + std::to_string(k) + " j=" + std::to_string(j));
    }
  }
  const ChainSpec two_point{{q(1, 4), q(3, 4)}, law({{q(1, 4), q(1, 2)}, {q(3, 4), q(1, 2)}}), {}};
  t.expect(posterior_chain(two_point, 1).initial.at(q(3, 4)) == q(3, 4), "mu^(1)({3/4}) = 3/4");
}

// AC9
void negative_controls(Tally& t) {
  const auto X = testing_support::numbered_space(3);
  const Measure p0 = Measure::uniform(X, q(1, 3));
  const RegionSet e = RegionSet::empty(X), b1 = region(X, {"1"}), b2 = region(X, {"1", "2"});

  TransitionSystem ts;
  ts.set(e, b1, empirical_kernel(p0, 2, e, b1));
  ts.set(e, b2, empirical_kernel(p0, 2, e, b2));
  GridKernel g = *empirical_kernel(p0, 2, b1, b2).as_grid();
  g.rows[*g.source_index(q(1, 2))] = {q(0), q(1, 3), q(2, 3)};
  ts.set(b1, b2, Kernel::grid(g.source, g.target, g.rows));
  const auto ck = check_chapman_kolmogorov(ts, e, b1, b2);
  t.expect(!ck.pass && !ck.witnesses.empty(), "perturbed kernel entry");

  const auto ef = RpmModel::empirical_fixed(p0, 2);
  const ExtractedF ex = extract_F_from_model(enumerate_joint(ef, 0), build_indexing_collection(X, {b1, b2}), b1, b2);
  t.expect(!ex.independence.pass && !ex.independence.witnesses.empty(), "empirical model in the NTR independence test");

  Gen gen(909);
  const ChainSpec c = random_chain_spec(gen, 3);
  std::size_t j = 1;
  while (backward_alpha(c, j).alpha == 0) ++j;
  ChainSpec claimed = c;  // the prior, claimed as the posterior
  const auto corrupt = compare_chain_posterior(c, j, claimed);
  t.expect(!corrupt.pass && !corrupt.witnesses.empty(), "corrupted chain posterior");
}

// AC10
void monte_carlo(Tally& t) {
  const auto X = testing_support::numbered_space(3);
  const auto prefix = testing_support::prefix_regions(X);
  const std::vector<RegionSet> tracked(prefix.begin() + 1, prefix.end() - 1);
  const std::vector<RpmModel> models{
      RpmModel::empirical_fixed(Measure::uniform(X, q(1, 3)), 2),
      RpmModel::empirical_dirichlet(Measure::uniform(X, q(1)), 2),
      RpmModel::dirichlet(Measure::uniform(X, q(1))),
  };
  const std::uint64_t seed = 20240601, reps = 100000;
  for (const auto& m : models) {
    for (std::size_t n = 1; n <= 2; ++n) {
      const auto first = verify_monte_carlo(m, n, seed, reps, tracked);
      const auto second = verify_monte_carlo(m, n, seed, reps, tracked);
      std::ostringstream z;
      z << (first.max_abs_z ? *first.max_abs_z : 0.0);
      t.expect(first.pass, m.kind() + " n=" + std::to_string(n) + " max |z| = " + z.str());
      t.expect(json::report(first).dump() == json::report(second).dump(), m.kind() + " rerun differs");
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "Chapman-Kolmogorov on the 3-atom chain collection", 5, chapman_kolmogorov},
      {"AC2", "kernel rows equal oracle conditionals", 30, kernel_vs_oracle},
      {"AC3", "posterior Markov property, chains <= 4, n <= 2", 120, posterior_markov},
      {"AC4", "single-observation shifted kernel", 0, shift_n1},
      {"AC5", "Dirichlet conjugacy, moment order 4", 0, dirichlet_conjugacy},
      {"AC6", "NTR posterior, k <= 3, n <= 2", 0, ntr_posterior},
      {"AC7", "outside-observation formulas", 0, outside_formulas},
      {"AC8", "chain posterior and neutral update", 0, chain_posterior},
      {"AC9", "negative controls fail with witnesses", 0, negative_controls},
      {"AC10", "Monte Carlo within 3 sigma, reproducible", 0, monte_carlo},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Tally tally;
    std::string error;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(tally);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || seconds < c.limit_seconds;
    const bool pass = error.empty() && tally.failed() == 0 && tally.checks() > 0 && in_time;
    char timing[64];
    if (c.limit_seconds > 0) {
      std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", seconds, c.limit_seconds);
    } else {
      std::snprintf(timing, sizeof timing, "%.2f s", seconds);
    }
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << tally.checks() - tally.failed()
              << "/" << tally.checks() << " checks (" << timing << ")\n";
    if (!error.empty()) std::cout << "    error: " << error << "\n";
    if (!in_time) std::cout << "    over the time limit\n";
    for (const auto& f : tally.failures()) std::cout << "    failed: " << f << "\n";
    if (!pass) ++failed;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
