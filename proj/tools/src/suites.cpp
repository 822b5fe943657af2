#include "suites.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "qmrpm/errors.hpp"

namespace qmrpm::cli {

namespace {

std::string chain_text(const std::vector<RegionSet>& chain) {
  std::string s;
  for (const auto& b : chain) s += (s.empty() ? "" : " <= ") + b.to_string();
  return s;
}

std::string pair_text(const RegionSet& b1, const RegionSet& b2) { return b1.to_string() + " <= " + b2.to_string(); }

std::string triple_text(const std::array<RegionSet, 3>& t) {
  return t[0].to_string() + " <= " + t[1].to_string() + " <= " + t[2].to_string();
}

CheckReport start(const std::string& suite, const std::string& subject) {
  CheckReport r;
  r.check = suite;
  r.add_input("subject", subject);
  return r;
}

std::vector<std::pair<RegionSet, RegionSet>> strict_pairs(const std::vector<RegionSet>& regions) {
  std::vector<std::pair<RegionSet, RegionSet>> out;
  for (const auto& b1 : regions) {
    for (const auto& b2 : regions) {
      if (b1 != b2 && b1.subset_of(b2)) out.emplace_back(b1, b2);
    }
  }
  return out;
}

/// Observation vectors grouped by length, in first-appearance order within each length.
std::map<std::size_t, std::vector<ObservationVector>> by_length(const std::vector<ObservationVector>& xs) {
  std::map<std::size_t, std::vector<ObservationVector>> out;
  for (const auto& x : xs) out[x.size()].push_back(x);
  return out;
}

std::vector<RegionSet> tracked_regions(const RunConfig& c) {
  std::vector<RegionSet> out;
  for (const auto& r : c.regions) {
    if (!r.is_empty() && r != RegionSet::full(c.space)) out.push_back(r);
  }
  return out;
}

void ck_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    tasks.push_back({"ck", m.name, [&c, &m] {
                       CheckReport r = start("ck", m.name);
                       r.add_input("model", m.value.kind());
                       const TransitionSystem ts = build_transition_system(m.value, c.regions);
                       for (const auto& t : ts.triples()) {
                         r.absorb(check_chapman_kolmogorov(ts, t[0], t[1], t[2], c.moment_order), triple_text(t));
                       }
                       return r;
                     }});
  }
  for (const auto& s : c.transition_systems) {
    tasks.push_back({"ck", s.name, [&c, &s] {
                       CheckReport r = start("ck", s.name);
                       r.add_input("system", "declared");
                       for (const auto& t : s.value.triples()) {
                         r.absorb(check_chapman_kolmogorov(s.value, t[0], t[1], t[2], c.moment_order), triple_text(t));
                       }
                       return r;
                     }});
  }
}

void c1c3_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    if (!m.value.finite_latent()) continue;
    tasks.push_back({"c1c3", m.name, [&c, &m] {
                       CheckReport r = start("c1c3", m.name);
                       r.add_input("model", m.value.kind());
                       for (const auto& chain : c.chains) r.absorb(verify_c1_c3(m.value, chain, c.budget), chain_text(chain));
                       return r;
                     }});
  }
}

void posterior_markov_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    if (!m.value.finite_latent()) continue;
    tasks.push_back({"posterior-markov", m.name, [&c, &m] {
                       CheckReport r = start("posterior-markov", m.name);
                       r.add_input("model", m.value.kind());
                       for (const auto& [n, xs] : by_length(observation_set(c))) {
                         const JointTable table = enumerate_joint(m.value, n, c.budget);
                         for (const auto& x : xs) {
                           if (table.observation_probability(x) == 0) continue;
                           for (const auto& chain : c.chains) {
                             if (chain.size() < 2) continue;
                             r.absorb(verify_posterior_markov(m.value, table, chain, x),
                                      "x=" + describe_observations(c.space, x) + " " + chain_text(chain));
                           }
                         }
                       }
                       return r;
                     }});
  }
}

void central_bayes_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    if (!m.value.finite_latent()) continue;
    tasks.push_back({"central-bayes", m.name, [&c, &m] {
                       CheckReport r = start("central-bayes", m.name);
                       r.add_input("model", m.value.kind());
                       r.add_input("max_n", std::to_string(c.max_observations));
                       for (std::size_t n = 0; n <= c.max_observations; ++n) {
                         const JointTable table = enumerate_joint(m.value, n, c.budget);
                         for (const auto& [b1, b2] : strict_pairs(c.regions)) {
                           r.absorb(verify_central_bayes(table, b1, b2, prior_kernel(m.value, b1, b2)),
                                    "n=" + std::to_string(n) + " " + pair_text(b1, b2));
                         }
                       }
                       return r;
                     }});
  }
}

void shift_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    if (!m.value.finite_latent() || m.value.draws() < 2) continue;
    tasks.push_back({"shift-n1", m.name, [&c, &m] {
                       CheckReport r = start("shift-n1", m.name);
                       r.add_input("model", m.value.kind());
                       const JointTable table = enumerate_joint(m.value, 1, c.budget);
                       for (const auto& [b1, b2] : strict_pairs(c.regions)) {
                         for (std::size_t x = 0; x < c.space.size(); ++x) {
                           if (table.observation_probability({x}) == 0) continue;
                           r.absorb(verify_shift_n1(m.value, x, b1, b2, c.budget),
                                    "x=" + c.space.label(x) + " " + pair_text(b1, b2));
                         }
                       }
                       return r;
                     }});
  }
}

void dirichlet_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    const auto* d = std::get_if<DirichletModel>(&m.value.variant());
    if (!d) continue;
    tasks.push_back({"dirichlet-posterior", m.name, [&c, &m, d] {
                       CheckReport r = start("dirichlet-posterior", m.name);
                       r.add_input("moment_order", std::to_string(c.moment_order));
                       for (const auto& x : observation_set(c)) {
                         bool possible = true;
                         for (const auto a : x) possible = possible && d->alpha[a] > 0;
                         if (!possible) continue;
                         r.absorb(dirichlet_posterior_check(d->alpha, x, c.moment_order),
                                  "x=" + describe_observations(c.space, x));
                       }
                       return r;
                     }});
  }
}

void ntr_system_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  auto all_triples = [](const FSystem& fs, CheckReport& r) {
    for (const auto& t : fs.triples()) r.absorb(check_ntr_system(fs, t[0], t[1], t[2]), triple_text(t));
  };
  for (const auto& s : c.f_systems) {
    tasks.push_back({"ntr-system", s.name, [&s, all_triples] {
                       CheckReport r = start("ntr-system", s.name);
                       r.add_input("system", "declared");
                       all_triples(s.value, r);
                       return r;
                     }});
  }
  for (const auto& p : c.ntr_priors) {
    tasks.push_back({"ntr-system", p.name, [&p, all_triples] {
                       CheckReport r = start("ntr-system", p.name);
                       r.add_input("system", "prior");
                       all_triples(prior_f_system(p.value, p.value.cell_space()), r);
                       return r;
                     }});
  }
  // Independence of the increments from the inside of B1, probed on the finite models.
  for (const auto& m : c.models) {
    if (!m.value.finite_latent()) continue;
    tasks.push_back({"ntr-independence", m.name,
                     [&c, &m] {
                       CheckReport r = start("ntr-independence", m.name);
                       r.add_input("model", m.value.kind());
                       const JointTable table = enumerate_joint(m.value, 0, c.budget);
                       for (const auto& [b1, b2] : strict_pairs(c.regions)) {
                         r.absorb(extract_F_from_model(table, c.collection, b1, b2).independence, pair_text(b1, b2));
                       }
                       return r;
                     },
                     true});
  }
}

void ntr_posterior_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& p : c.ntr_priors) {
    tasks.push_back({"ntr-posterior", p.name, [&c, &p] {
                       CheckReport r = start("ntr-posterior", p.name);
                       r.add_input("max_n", std::to_string(c.max_observations));
                       const SampleSpace cells = p.value.cell_space();
                       for (std::size_t n = 0; n <= c.max_observations; ++n) {
                         const JointTable table = enumerate_ntr_joint(p.value, n, c.budget);
                         for (const auto& x : all_observations(cells, n)) {
                           if (table.observation_probability(x) == 0) continue;
                           r.absorb(verify_ntr_posterior(p.value, x, c.budget), "x=" + describe_observations(cells, x));
                         }
                       }
                       return r;
                     }});
  }
}

bool outside_qualifies(const ObservationVector& x, const RegionSet& b1, const RegionSet& b2) {
  return std::none_of(x.begin(), x.end(), [&](std::size_t a) { return b2.contains(a) && !b1.contains(a); });
}

void outside_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& p : c.ntr_priors) {
    tasks.push_back({"outside-formulas", p.name, [&c, &p] {
                       CheckReport r = start("outside-formulas", p.name);
                       r.add_input("max_n", std::to_string(c.max_observations));
                       const SampleSpace cells = p.value.cell_space();
                       const auto regions = p.value.regions(cells);
                       const JointTable prior = enumerate_ntr_joint(p.value, 0, c.budget);
                       for (std::size_t n = 0; n <= c.max_observations; ++n) {
                         const JointTable table = enumerate_ntr_joint(p.value, n, c.budget);
                         for (const auto& [b1, b2] : strict_pairs(regions)) {
                           for (const auto& x : all_observations(cells, n)) {
                             if (!outside_qualifies(x, b1, b2) || table.observation_probability(x) == 0) continue;
                             r.absorb(verify_outside_formula(prior, table, b1, b2, x),
                                      "x=" + describe_observations(cells, x) + " " + pair_text(b1, b2));
                           }
                         }
                       }
                       return r;
                     }});
  }
  // The posterior of P_B from observations outside B, for the finite models at n = 1.
  for (const auto& m : c.models) {
    if (!m.value.finite_latent()) continue;
    tasks.push_back({"outside-formulas", m.name, [&c, &m] {
                       CheckReport r = start("outside-formulas", m.name);
                       r.add_input("model", m.value.kind());
                       r.add_input("n", "1");
                       const JointTable prior = enumerate_joint(m.value, 0, c.budget);
                       const JointTable table = enumerate_joint(m.value, 1, c.budget);
                       const RegionSet empty = RegionSet::empty(c.space);
                       for (const auto& b : c.regions) {
                         if (b.is_empty()) continue;
                         for (std::size_t a = 0; a < c.space.size(); ++a) {
                           if (b.contains(a) || table.observation_probability({a}) == 0) continue;
                           r.absorb(verify_outside_formula(prior, table, empty, b, {a}),
                                    "x=" + describe_observations(c.space, {a}) + " B=" + b.to_string());
                         }
                       }
                       return r;
                     }});
  }
}

void chain_bayes_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& s : c.chain_specs) {
    tasks.push_back({"chain-bayes", s.name, [&s] {
                       CheckReport r = start("chain-bayes", s.name);
                       r.add_input("k", std::to_string(s.value.length()));
                       for (std::size_t j = 1; j <= s.value.length() + 1; ++j) {
                         if (backward_alpha(s.value, j).alpha == 0) continue;
                         r.absorb(verify_chain_posterior(s.value, j), "j=" + std::to_string(j));
                       }
                       return r;
                     }});
  }
  for (const auto& v : c.neutral_vectors) {
    tasks.push_back({"chain-bayes", v.name, [&v] {
                       CheckReport r = start("chain-bayes", v.name);
                       r.add_input("k", std::to_string(v.value.laws.size()));
                       const ChainSpec chain = chain_from_neutral(v.value);
                       for (std::size_t j = 1; j <= v.value.laws.size() + 1; ++j) {
                         if (backward_alpha(chain, j).alpha == 0) continue;
                         r.absorb(verify_neutral_update(v.value, j), "j=" + std::to_string(j));
                         r.absorb(verify_chain_posterior(chain, j), "j=" + std::to_string(j));
                       }
                       return r;
                     }});
  }
}

void sample_tasks(const RunConfig& c, std::vector<Task>& tasks) {
  for (const auto& m : c.models) {
    tasks.push_back({"sample", m.name, [&c, &m] {
                       CheckReport r = verify_monte_carlo(m.value, c.mc_n, c.seed, c.mc_reps, tracked_regions(c), c.budget);
                       r.check = "sample";
                       r.inputs.insert(r.inputs.begin(), {"subject", m.name});
                       return r;
                     }});
  }
}

}  // namespace

std::vector<Task> build_tasks(const RunConfig& config, const std::vector<std::string>& suites) {
  using Builder = void (*)(const RunConfig&, std::vector<Task>&);
  static const std::map<std::string, Builder> builders = {
      {"ck", ck_tasks},
      {"c1c3", c1c3_tasks},
      {"posterior-markov", posterior_markov_tasks},
      {"central-bayes", central_bayes_tasks},
      {"shift-n1", shift_tasks},
      {"dirichlet-posterior", dirichlet_tasks},
      {"ntr-system", ntr_system_tasks},
      {"ntr-posterior", ntr_posterior_tasks},
      {"outside-formulas", outside_tasks},
      {"chain-bayes", chain_bayes_tasks},
      {"sample", sample_tasks},
  };
  std::vector<Task> tasks;
  for (const auto& name : suite_names()) {
    if (std::find(suites.begin(), suites.end(), name) == suites.end()) continue;
    builders.at(name)(config, tasks);
  }
  return tasks;
}

std::vector<CheckReport> run_tasks(const std::vector<Task>& tasks, unsigned jobs) {
  std::vector<CheckReport> results(tasks.size());
  std::vector<std::exception_ptr> resource_errors(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      try {
        results[i] = timed(t.run);
      } catch (const ResourceError&) {
        resource_errors[i] = std::current_exception();
      } catch (const Error& e) {
        CheckReport r = start(t.suite, t.subject);
        r.fail("error", "check completes", e.what());
        results[i] = std::move(r);
      }
    }
  };

  const unsigned n = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (const auto& e : resource_errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace qmrpm::cli
