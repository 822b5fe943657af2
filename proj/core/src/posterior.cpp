#include "qmrpm/posterior.hpp"

#include <set>

#include "qmrpm/compare.hpp"
#include "qmrpm/errors.hpp"

namespace qmrpm {

namespace {

bool next_tuple(std::vector<std::size_t>& t, std::size_t base) {
  for (std::size_t i = t.size(); i-- > 0;) {
    if (++t[i] < base) return true;
    t[i] = 0;
  }
  return false;
}

std::string chain_text(const std::vector<RegionSet>& chain) {
  std::string s;
  for (const auto& b : chain) s += (s.empty() ? "" : " <= ") + b.to_string();
  return s;
}

std::vector<Rational> sorted_values(const std::set<Rational>& s) { return {s.begin(), s.end()}; }

// Compares rows of two kernels at the given source points only.
void compare_rows_at(CheckReport& report, const std::string& where, const Kernel& expected,
                     const Kernel& actual, const std::vector<Rational>& sources) {
  for (const auto& z1 : sources) {
    const bool de = expected.defined_at(z1);
    const bool da = actual.defined_at(z1);
    if (!de || !da) {
      report.fail(where + " z1=" + to_string(z1), de ? "row" : "no row", da ? "row" : "no row");
      continue;
    }
    compare_distributions(report, where + " z1=" + to_string(z1), expected.row(z1), actual.row(z1));
  }
}

const std::vector<Rational>& grid_sources(const Kernel& k) {
  static const std::vector<Rational> none;
  const auto* g = k.as_grid();
  return g ? g->source : none;
}

// Per-latent weight of {X = x}, read off the table entries.
std::vector<Rational> weights_given(const JointTable& table, const ObservationVector& x) {
  if (x.size() != table.n()) {
    throw ValidationError("observation vector has length " + std::to_string(x.size()) +
                          " but the table was built for n = " + std::to_string(table.n()));
  }
  for (auto a : x) {
    if (a >= table.space().size()) throw ValidationError("observation atom out of range");
  }
  std::vector<Rational> w(table.latents().size(), Rational(0));
  for (const auto& e : table.entries()) {
    if (e.obs == x) w[e.latent] += e.prob;
  }
  return w;
}

}  // namespace

std::string describe_observations(const SampleSpace& space, const ObservationVector& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + space.label(x[i]);
  return s + ")";
}

std::vector<ObservationVector> all_observations(const SampleSpace& space, std::size_t n) {
  std::vector<ObservationVector> out;
  ObservationVector x(n, 0);
  do {
    out.push_back(x);
  } while (next_tuple(x, space.size()));
  return out;
}

PosteriorKernel posterior_kernel(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                 const ObservationVector& x) {
  if (!b1.subset_of(b2)) {
    throw ValidationError("kernel regions not nested: " + b1.to_string() + " within " + b2.to_string());
  }
  const std::vector<Rational> w = weights_given(table, x);
  std::map<Rational, Distribution> joint;
  std::set<Rational> target;
  Rational total = 0;
  for (std::size_t li = 0; li < w.size(); ++li) {
    target.insert(table.mass(li, b2));
    if (w[li] == 0) continue;
    add_mass(joint[table.mass(li, b1)], table.mass(li, b2), w[li]);
    total += w[li];
  }
  if (total == 0) {
    throw UndefinedConditional("observation " + describe_observations(table.space(), x) +
                               " has probability zero");
  }
  std::vector<Rational> source;
  std::vector<std::vector<Rational>> rows;
  const std::vector<Rational> tgt = sorted_values(target);
  for (const auto& [z1, law] : joint) {
    const Distribution row = normalized(law);
    std::vector<Rational> dense;
    for (const auto& z2 : tgt) {
      const auto it = row.find(z2);
      dense.push_back(it == row.end() ? Rational(0) : it->second);
    }
    source.push_back(z1);
    rows.push_back(std::move(dense));
  }
  return {Kernel::grid(std::move(source), tgt, std::move(rows)), x, b1, b2};
}

PosteriorKernel posterior_kernel(const RpmModel& model, const RegionSet& b1, const RegionSet& b2,
                                 const ObservationVector& x, std::uint64_t budget) {
  return posterior_kernel(enumerate_joint(model, x.size(), budget), b1, b2, x);
}

Distribution posterior_law(const JointTable& table, const RegionSet& b, const ObservationVector& x) {
  const std::vector<Rational> w = weights_given(table, x);
  Distribution law;
  for (std::size_t li = 0; li < w.size(); ++li) add_mass(law, table.mass(li, b), w[li]);
  return normalized(std::move(law));
}

CheckReport verify_central_bayes(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                 const Kernel& prior, std::uint64_t max_events) {
  CheckReport report;
  report.check = "central-bayes";
  report.add_input("pair", b1.to_string() + " <= " + b2.to_string());
  report.add_input("n", std::to_string(table.n()));

  const SampleSpace& space = table.space();
  const std::size_t atoms = space.size();
  const std::vector<ObservationVector> xs = all_observations(space, table.n());
  const std::size_t nx = xs.size();

  // Index each observation tuple for fast lookup from entries.
  std::map<ObservationVector, std::size_t> x_index;
  for (std::size_t i = 0; i < nx; ++i) x_index.emplace(xs[i], i);

  std::set<Rational> z1_values;
  for (std::size_t li = 0; li < table.latents().size(); ++li) z1_values.insert(table.mass(li, b1));

  // Event masks: one nonempty atom subset per coordinate.
  const std::uint64_t subsets = (std::uint64_t{1} << atoms) - 1;
  std::uint64_t product_events = 1;
  for (std::size_t i = 0; i < table.n(); ++i) product_events *= subsets;

  for (const auto& z1 : z1_values) {
    // joint[x][z2] = P(X = x, P_{B1} = z1, P_{B2} = z2); pair[z2] = P(P_{B1} = z1, P_{B2} = z2).
    std::set<Rational> z2_set;
    if (prior.defined_at(z1)) {
      for (const auto& [v, p] : prior.row(z1)) z2_set.insert(v);
    }
    for (std::size_t li = 0; li < table.latents().size(); ++li) {
      if (table.mass(li, b1) == z1) z2_set.insert(table.mass(li, b2));
    }
    const std::vector<Rational> z2s = sorted_values(z2_set);
    std::map<Rational, std::size_t> z2_index;
    for (std::size_t j = 0; j < z2s.size(); ++j) z2_index.emplace(z2s[j], j);

    std::vector<std::vector<Rational>> joint(nx, std::vector<Rational>(z2s.size(), Rational(0)));
    std::vector<Rational> pair(z2s.size(), Rational(0));
    Rational nu = 0;
    for (std::size_t li = 0; li < table.latents().size(); ++li) {
      if (table.mass(li, b1) != z1) continue;
      pair[z2_index.at(table.mass(li, b2))] += table.latents()[li].weight;
      nu += table.latents()[li].weight;
    }
    for (const auto& e : table.entries()) {
      if (table.mass(e, b1) != z1) continue;
      joint[x_index.at(e.obs)][z2_index.at(table.mass(e, b2))] += e.prob;
    }

    const std::string at = "z1=" + to_string(z1);
    if (!prior.defined_at(z1)) {
      report.fail(at, "prior kernel row", "no row");
      continue;
    }
    const Distribution prior_row = prior.row(z1);

    // lhs[x][z2] = Q^(x)(z1; {z2}) P(X = x | P_{B1} = z1)
    // rhs[x][z2] = P(X = x | P_{B1} = z1, P_{B2} = z2) Q(z1; {z2})
    std::vector<std::vector<Rational>> lhs(nx), rhs(nx);
    for (std::size_t xi = 0; xi < nx; ++xi) {
      Rational px = 0;
      for (const auto& v : joint[xi]) px += v;
      const Rational tilde_b1 = px / nu;
      for (std::size_t j = 0; j < z2s.size(); ++j) {
        lhs[xi].push_back(px == 0 ? Rational(0) : Rational(joint[xi][j] / px * tilde_b1));
        const auto it = prior_row.find(z2s[j]);
        const Rational q = it == prior_row.end() ? Rational(0) : it->second;
        const Rational tilde = pair[j] == 0 ? tilde_b1 : Rational(joint[xi][j] / pair[j]);
        rhs[xi].push_back(tilde * q);
      }
    }

    auto compare_event = [&](const std::vector<std::size_t>& members, std::uint64_t gamma,
                             const std::function<std::string()>& where) {
      Rational l = 0, r = 0;
      for (auto xi : members) {
        for (std::size_t j = 0; j < z2s.size(); ++j) {
          if ((gamma >> j) & 1U) {
            l += lhs[xi][j];
            r += rhs[xi][j];
          }
        }
      }
      if (l == r) {
        ++report.comparisons;
      } else {
        report.compare(where(), l, r);
      }
    };
    auto gamma_text = [&](std::uint64_t gamma) {
      std::string s = "{";
      bool first = true;
      for (std::size_t j = 0; j < z2s.size(); ++j) {
        if ((gamma >> j) & 1U) {
          s += (first ? "" : ",") + to_string(z2s[j]);
          first = false;
        }
      }
      return s + "}";
    };

    const std::uint64_t gammas = std::uint64_t{1} << z2s.size();
    const bool full = z2s.size() < 63 && product_events * gammas <= max_events;
    if (!full) {
      for (std::size_t xi = 0; xi < nx; ++xi) {
        for (std::size_t j = 0; j < z2s.size(); ++j) {
          compare_event({xi}, std::uint64_t{1} << j, [&] {
            return at + " x=" + describe_observations(space, xs[xi]) + " z2=" + to_string(z2s[j]);
          });
        }
      }
      continue;
    }
    std::vector<std::uint64_t> masks(table.n(), 1);
    while (true) {
      std::vector<std::size_t> members;
      for (std::size_t xi = 0; xi < nx; ++xi) {
        bool in = true;
        for (std::size_t i = 0; i < table.n() && in; ++i) in = (masks[i] >> xs[xi][i]) & 1U;
        if (in) members.push_back(xi);
      }
      for (std::uint64_t gamma = 1; gamma < gammas; ++gamma) {
        compare_event(members, gamma, [&] {
          std::string s = at + " A=";
          for (std::size_t i = 0; i < table.n(); ++i) {
            s += (i ? "x" : "") + RegionSet(space, masks[i]).to_string();
          }
          return s + " G=" + gamma_text(gamma);
        });
      }
      std::size_t i = 0;
      while (i < table.n() && ++masks[i] > subsets) masks[i++] = 1;
      if (i == table.n()) break;
    }
  }
  return report;
}

CheckReport verify_central_bayes(const RpmModel& model, const RegionSet& b1, const RegionSet& b2,
                                 std::size_t n, std::uint64_t budget) {
  CheckReport r = verify_central_bayes(enumerate_joint(model, n, budget), b1, b2, prior_kernel(model, b1, b2));
  r.inputs.insert(r.inputs.begin(), {"model", model.kind()});
  return r;
}

CheckReport verify_posterior_markov(const RpmModel& model, const std::vector<RegionSet>& chain,
                                    const ObservationVector& x, std::uint64_t budget) {
  return verify_posterior_markov(model, enumerate_joint(model, x.size(), budget), chain, x);
}

CheckReport verify_posterior_markov(const RpmModel& model, const JointTable& table,
                                    const std::vector<RegionSet>& chain, const ObservationVector& x) {
  CheckReport report;
  report.check = "posterior-markov";
  report.add_input("model", model.kind());
  report.add_input("chain", chain_text(chain));
  report.add_input("x", describe_observations(table.space(), x));
  if (chain.size() < 2) throw ValidationError("posterior Markov check needs a chain of length >= 2");
  partition_chain(chain);
  const std::size_t k = chain.size();

  std::map<std::pair<std::size_t, std::size_t>, Kernel> post;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) post.emplace(std::pair{i, j}, posterior_kernel(table, chain[i], chain[j], x).kernel);
  }

  // (i) factorization of the posterior path law.
  {
    const std::vector<Rational> w = weights_given(table, x);
    JointLaw oracle;
    for (std::size_t li = 0; li < w.size(); ++li) {
      std::vector<Rational> key;
      for (const auto& b : chain) key.push_back(table.mass(li, b));
      add_mass(oracle, key, w[li]);
    }
    oracle = normalized(std::move(oracle));

    JointLaw product;
    for (const auto& [z, p] : posterior_law(table, chain[0], x)) add_mass(product, {z}, p);
    for (std::size_t j = 1; j < k; ++j) {
      const Kernel& q = post.at({j - 1, j});
      JointLaw next;
      for (const auto& [path, p] : product) {
        if (!q.defined_at(path.back())) {
          report.fail("(i) step " + std::to_string(j) + " at " + describe(path), "row", "no row");
          continue;
        }
        for (const auto& [z, pz] : q.row(path.back())) {
          auto longer = path;
          longer.push_back(z);
          add_mass(next, longer, Rational(p * pz));
        }
      }
      product = std::move(next);
    }
    compare_joint_laws(report, "(i) path law", oracle, product);
  }

  // (ii) coherence on every triple.
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        const std::string where = "(ii) " + chain[i].to_string() + "->" + chain[j].to_string() + "->" +
                                  chain[l].to_string();
        try {
          compare_kernels(report, where, post.at({i, l}), compose_kernels(post.at({i, j}), post.at({j, l})));
        } catch (const ValidationError& e) {
          report.fail(where, "composable kernels", e.what());
        }
      }
    }
  }

  // (iii) observations inside B_i do not matter.
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const RegionSet& b1 = chain[i];
      const Kernel& q = post.at({i, j});
      const std::string pair = chain[i].to_string() + "->" + chain[j].to_string();
      std::vector<std::vector<std::size_t>> choices;
      bool all_inside = true;
      for (auto a : x) {
        if (b1.contains(a)) {
          choices.push_back(b1.atoms());
        } else {
          choices.push_back({a});
          all_inside = false;
        }
      }
      std::vector<std::size_t> pick(x.size(), 0);
      bool more = true;
      while (more) {
        ObservationVector alt(x.size());
        for (std::size_t c = 0; c < x.size(); ++c) alt[c] = choices[c][pick[c]];
        if (alt != x && table.observation_probability(alt) > 0) {
          const Kernel qa = posterior_kernel(table, chain[i], chain[j], alt).kernel;
          std::vector<Rational> common;
          for (const auto& z1 : grid_sources(q)) {
            if (qa.defined_at(z1)) common.push_back(z1);
          }
          compare_rows_at(report, "(iii) " + pair + " x'=" + describe_observations(table.space(), alt), q,
                          qa, common);
        }
        std::size_t c = 0;
        while (c < x.size() && ++pick[c] >= choices[c].size()) pick[c++] = 0;
        more = c < x.size();
      }
      if (all_inside) {
        compare_rows_at(report, "(iii) prior " + pair, prior_kernel(model, chain[i], chain[j]), q,
                        grid_sources(q));
      }
    }
  }
  return report;
}

Kernel shifted_kernel_n1(const RpmModel& model, std::size_t x, const RegionSet& b1, const RegionSet& b2) {
  const unsigned N = model.draws();
  if (N < 2) throw ValidationError("the shift formula needs N >= 2");
  if (x >= model.space().size()) throw ValidationError("observation atom out of range");
  // Given X = x the other N - 1 urn draws follow the urn started from alpha + delta_x.
  const Kernel smaller = std::holds_alternative<EmpiricalFixedModel>(model.variant())
                             ? empirical_kernel(model.measure(), N - 1, b1, b2)
                             : polya_kernel(model.measure().plus_point_masses({x}), N - 1, b1, b2);
  const int d1 = b1.contains(x) ? 1 : 0;
  const int d2 = b2.contains(x) ? 1 : 0;

  std::vector<Rational> source, target;
  std::vector<std::vector<Rational>> rows;
  for (unsigned m = 0; m <= N; ++m) target.push_back(make_rational(m, N));
  for (int m1 = 0; m1 <= static_cast<int>(N); ++m1) {
    const int s = m1 - d1;
    if (s < 0 || s > static_cast<int>(N) - 1) continue;
    const Rational zs = make_rational(s, N - 1);
    if (!smaller.defined_at(zs)) continue;
    const Distribution row = smaller.row(zs);
    std::vector<Rational> dense;
    for (int m2 = 0; m2 <= static_cast<int>(N); ++m2) {
      const int t = m2 - d2;
      if (t < 0 || t > static_cast<int>(N) - 1) {
        dense.emplace_back(0);
        continue;
      }
      const auto it = row.find(make_rational(t, N - 1));
      dense.push_back(it == row.end() ? Rational(0) : it->second);
    }
    source.push_back(make_rational(m1, N));
    rows.push_back(std::move(dense));
  }
  return Kernel::grid(std::move(source), std::move(target), std::move(rows));
}

CheckReport verify_shift_n1(const RpmModel& model, std::size_t x, const RegionSet& b1, const RegionSet& b2,
                            std::uint64_t budget) {
  CheckReport report;
  report.check = "shift-n1";
  report.add_input("model", model.kind());
  report.add_input("N", std::to_string(model.draws()));
  report.add_input("pair", b1.to_string() + " <= " + b2.to_string());
  report.add_input("x", model.space().label(x));
  const JointTable table = enumerate_joint(model, 1, budget);
  if (table.observation_probability({x}) == 0) return report;
  const Kernel oracle = posterior_kernel(table, b1, b2, {x}).kernel;
  const Kernel shifted = shifted_kernel_n1(model, x, b1, b2);
  for (const auto& z1 : grid_sources(oracle)) {
    if (!shifted.defined_at(z1)) {
      throw InternalConsistencyError("shifted kernel has no row at positive-probability point " + to_string(z1));
    }
  }
  compare_rows_at(report, "Q^(x)", shifted, oracle, grid_sources(oracle));
  return report;
}

CheckReport dirichlet_posterior_check(const Measure& alpha, const ObservationVector& x, unsigned max_order) {
  CheckReport report;
  report.check = "dirichlet-posterior";
  report.add_input("x", describe_observations(alpha.space(), x));
  report.add_input("moment_order", std::to_string(max_order));
  const std::size_t atoms = alpha.space().size();
  std::vector<unsigned> ex(atoms, 0);
  for (auto a : x) {
    if (a >= atoms) throw ValidationError("observation atom out of range");
    ++ex[a];
  }
  const Rational evidence = dirichlet_atom_moment(alpha, ex);
  if (evidence == 0) {
    throw UndefinedConditional("observation " + describe_observations(alpha.space(), x) + " has probability zero");
  }
  const Measure updated = alpha.plus_point_masses(x);

  for (unsigned order = 1; order <= max_order; ++order) {
    // Exponent vectors of the given total order.
    std::vector<unsigned> q(atoms, 0);
    auto recurse = [&](auto&& self, std::size_t a, unsigned left) -> void {
      if (a + 1 == atoms) {
        q[a] = left;
        std::vector<unsigned> joint = q;
        for (std::size_t i = 0; i < atoms; ++i) joint[i] += ex[i];
        const Rational ratio = dirichlet_atom_moment(alpha, joint) / evidence;
        const Rational direct = dirichlet_atom_moment(updated, q);
        if (ratio == direct) {
          ++report.comparisons;
        } else {
          std::string where = "E[";
          for (std::size_t i = 0; i < atoms; ++i) {
            if (q[i]) where += "P" + alpha.space().label(i) + "^" + std::to_string(q[i]);
          }
          report.compare(where + "]", direct, ratio);
        }
        return;
      }
      for (unsigned c = 0; c <= left; ++c) {
        q[a] = c;
        self(self, a + 1, left - c);
      }
    };
    recurse(recurse, 0, order);
  }
  return report;
}

Rational dirichlet_posterior_mean(const Measure& alpha, const ObservationVector& x, const RegionSet& a) {
  std::vector<unsigned> ex(alpha.space().size(), 0);
  for (auto i : x) ++ex.at(i);
  const Rational evidence = dirichlet_atom_moment(alpha, ex);
  if (evidence == 0) throw UndefinedConditional("observation has probability zero");
  Rational sum = 0;
  for (auto atom : a.atoms()) {
    auto e = ex;
    ++e[atom];
    sum += dirichlet_atom_moment(alpha, e);
  }
  return sum / evidence;
}

}  // namespace qmrpm
