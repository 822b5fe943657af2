#include "qmrpm/chain_bayes.hpp"

#include <algorithm>
#include <set>

#include "qmrpm/compare.hpp"
#include "qmrpm/errors.hpp"
#include "qmrpm/models.hpp"

namespace qmrpm {

namespace {

const GridKernel& grid_of(const Kernel& k, std::size_t step) {
  const auto* g = k.as_grid();
  if (!g) throw ValidationError("chain kernel " + std::to_string(step) + " is not a grid kernel");
  return *g;
}

bool on_grid(const std::vector<Rational>& grid, const Rational& v) {
  return std::binary_search(grid.begin(), grid.end(), v);
}

// Label weight Y_j of an extended path (Z_0 = 0, Z_{k+1} = 1).
Rational label_weight(const std::vector<Rational>& z, std::size_t j) {
  const Rational upper = j <= z.size() ? z[j - 1] : Rational(1);
  const Rational lower = j >= 2 ? z[j - 2] : Rational(0);
  return upper - lower;
}

void require_label(std::size_t j, std::size_t k) {
  if (j < 1 || j > k + 1) {
    throw ValidationError("label " + std::to_string(j) + " outside 1.." + std::to_string(k + 1));
  }
}

Distribution reweighted(const IncrementLaw& f, bool by_v, const std::string& what) {
  IncrementLaw out;
  for (const auto& [v, p] : f) add_mass(out, v, Rational(p * (by_v ? v : Rational(1 - v))));
  if (total_mass(out) == 0) throw UndefinedConditional(what + " has a zero normalizer");
  return normalized(std::move(out));
}

}  // namespace

void validate_chain(const ChainSpec& chain) {
  const auto& grid = chain.grid;
  if (grid.empty()) throw ValidationError("chain grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0 || grid[i] > 1) throw ValidationError("grid value " + to_string(grid[i]) + " outside [0,1]");
    if (i > 0 && !(grid[i - 1] < grid[i])) throw ValidationError("chain grid is not strictly increasing");
  }
  std::set<Rational> reachable;
  for (const auto& [y, p] : chain.initial) {
    if (p < 0) throw ValidationError("negative initial probability");
    if (!on_grid(grid, y)) throw ValidationError("initial law puts mass off the grid at " + to_string(y));
    reachable.insert(y);
  }
  if (total_mass(chain.initial) != 1) throw ValidationError("initial law sums to " + to_string(total_mass(chain.initial)));

  for (std::size_t s = 0; s < chain.kernels.size(); ++s) {
    const GridKernel& g = grid_of(chain.kernels[s], s + 2);
    for (const auto& v : g.source) {
      if (!on_grid(grid, v)) throw ValidationError("kernel " + std::to_string(s + 2) + " source " + to_string(v) + " off the grid");
    }
    for (const auto& v : g.target) {
      if (!on_grid(grid, v)) throw ValidationError("kernel " + std::to_string(s + 2) + " target " + to_string(v) + " off the grid");
    }
    for (std::size_t r = 0; r < g.source.size(); ++r) {
      for (std::size_t t = 0; t < g.target.size(); ++t) {
        if (g.rows[r][t] != 0 && g.target[t] < g.source[r]) {
          throw ValidationError("kernel " + std::to_string(s + 2) + " moves mass down from " + to_string(g.source[r]) +
                                " to " + to_string(g.target[t]));
        }
      }
    }
    std::set<Rational> next;
    for (const auto& y : reachable) {
      const auto i = g.source_index(y);
      if (!i) throw ValidationError("kernel " + std::to_string(s + 2) + " has no row at reachable point " + to_string(y));
      for (std::size_t t = 0; t < g.target.size(); ++t) {
        if (g.rows[*i][t] != 0) next.insert(g.target[t]);
      }
    }
    reachable = std::move(next);
  }
}

JointLaw path_law(const ChainSpec& chain) {
  JointLaw law;
  for (const auto& [y, p] : chain.initial) add_mass(law, {y}, p);
  for (const auto& k : chain.kernels) {
    JointLaw next;
    for (const auto& [path, p] : law) {
      for (const auto& [z, q] : k.row(path.back())) {
        auto longer = path;
        longer.push_back(z);
        add_mass(next, longer, Rational(p * q));
      }
    }
    law = std::move(next);
  }
  return law;
}

BackwardAlpha backward_alpha(const ChainSpec& chain, std::size_t j) {
  const std::size_t k = chain.length();
  require_label(j, k);
  BackwardAlpha out;
  if (j == 1) {
    out.alpha = expectation(chain.initial, [](const Rational& y) { return y; });
    return out;
  }
  out.functions.resize(j - 1);
  GridFunction top;
  if (j == k + 1) {
    for (const auto& y : chain.grid) top[y] = 1 - y;
  } else {
    const GridKernel& g = grid_of(chain.kernels[j - 2], j);
    for (std::size_t r = 0; r < g.source.size(); ++r) {
      Rational e = 0;
      for (std::size_t t = 0; t < g.target.size(); ++t) e += g.rows[r][t] * (g.target[t] - g.source[r]);
      top[g.source[r]] = e;
    }
  }
  out.functions[j - 2] = std::move(top);
  for (std::size_t i = j - 1; i >= 2; --i) {
    const GridKernel& g = grid_of(chain.kernels[i - 2], i);
    const GridFunction& above = out.functions[i - 1];
    GridFunction f;
    for (std::size_t r = 0; r < g.source.size(); ++r) {
      Rational e = 0;
      bool defined = true;
      for (std::size_t t = 0; t < g.target.size() && defined; ++t) {
        if (g.rows[r][t] == 0) continue;
        const auto it = above.find(g.target[t]);
        if (it == above.end()) {
          defined = false;
        } else {
          e += g.rows[r][t] * it->second;
        }
      }
      if (defined) f[g.source[r]] = e;
    }
    out.functions[i - 2] = std::move(f);
  }
  Rational a = 0;
  for (const auto& [y, p] : chain.initial) {
    const auto it = out.functions[0].find(y);
    if (it == out.functions[0].end()) throw InternalConsistencyError("alpha undefined at an initial point");
    a += p * it->second;
  }
  out.alpha = a;
  return out;
}

ChainSpec posterior_chain(const ChainSpec& chain, std::size_t j) {
  validate_chain(chain);
  const std::size_t k = chain.length();
  const BackwardAlpha ba = backward_alpha(chain, j);
  if (ba.alpha == 0) throw UndefinedConditional("label " + std::to_string(j) + " has probability zero");

  ChainSpec post;
  post.grid = chain.grid;
  for (const auto& [y, p] : chain.initial) {
    const Rational w = j == 1 ? y : ba.functions[0].at(y);
    add_mass(post.initial, y, Rational(p * w / ba.alpha));
  }

  for (std::size_t i = 2; i <= k; ++i) {
    const Kernel& original = chain.kernels[i - 2];
    if (i > j) {
      post.kernels.push_back(original);
      continue;
    }
    const GridKernel& g = grid_of(original, i);
    std::vector<Rational> source;
    std::vector<std::vector<Rational>> rows;
    for (std::size_t r = 0; r < g.source.size(); ++r) {
      const Rational& y = g.source[r];
      const auto den = ba.functions[i - 2].find(y);
      if (den == ba.functions[i - 2].end() || den->second == 0) continue;
      std::vector<Rational> row;
      bool defined = true;
      for (std::size_t t = 0; t < g.target.size() && defined; ++t) {
        const Rational& q = g.rows[r][t];
        if (q == 0) {
          row.emplace_back(0);
        } else if (i == j) {
          row.push_back(q * (g.target[t] - y) / den->second);
        } else {
          const auto num = ba.functions[i - 1].find(g.target[t]);
          if (num == ba.functions[i - 1].end()) {
            defined = false;
          } else {
            row.push_back(q * num->second / den->second);
          }
        }
      }
      if (!defined) continue;
      source.push_back(y);
      rows.push_back(std::move(row));
    }
    post.kernels.push_back(Kernel::grid(std::move(source), g.target, std::move(rows)));
  }

  // Every posterior-reachable point must carry a row.
  std::set<Rational> reachable;
  for (const auto& [y, p] : post.initial) reachable.insert(y);
  for (std::size_t s = 0; s < post.kernels.size(); ++s) {
    std::set<Rational> next;
    for (const auto& y : reachable) {
      if (!post.kernels[s].defined_at(y)) {
        throw UndefinedConditional("posterior kernel " + std::to_string(s + 2) + " undefined at reachable point " +
                                   to_string(y));
      }
      for (const auto& [z, q] : post.kernels[s].row(y)) next.insert(z);
    }
    reachable = std::move(next);
  }
  return post;
}

NeutralVector neutral_update(const NeutralVector& nv, std::size_t j) {
  const std::size_t k = nv.laws.size();
  if (k == 0) throw ValidationError("neutral vector needs at least one fraction");
  require_label(j, k);
  NeutralVector out;
  for (std::size_t i = 1; i <= k; ++i) {
    const IncrementLaw& f = nv.laws[i - 1];
    require_increment_law(f);
    if (i == j) {
      out.laws.push_back(reweighted(f, true, "F_" + std::to_string(i)));
    } else if (i < j) {
      out.laws.push_back(reweighted(f, false, "F_" + std::to_string(i)));
    } else {
      out.laws.push_back(f);
    }
  }
  return out;
}

ChainSpec chain_from_neutral(const NeutralVector& nv) {
  if (nv.laws.empty()) throw ValidationError("neutral vector needs at least one fraction");
  for (const auto& f : nv.laws) require_increment_law(f);
  ChainSpec chain;
  chain.initial = nv.laws[0];
  std::set<Rational> grid;
  std::set<Rational> reachable;
  for (const auto& [v, p] : chain.initial) {
    grid.insert(v);
    reachable.insert(v);
  }
  std::vector<std::map<Rational, Distribution>> steps;
  for (std::size_t i = 1; i < nv.laws.size(); ++i) {
    std::map<Rational, Distribution> rows;
    std::set<Rational> next;
    for (const auto& y : reachable) {
      Distribution row = shift_increment(nv.laws[i], y);
      for (const auto& [z, q] : row) {
        grid.insert(z);
        next.insert(z);
      }
      rows.emplace(y, std::move(row));
    }
    steps.push_back(std::move(rows));
    reachable = std::move(next);
  }
  chain.grid.assign(grid.begin(), grid.end());
  for (const auto& rows : steps) {
    std::vector<Rational> source;
    std::vector<std::vector<Rational>> dense;
    for (const auto& [y, row] : rows) {
      std::vector<Rational> d;
      for (const auto& z : chain.grid) {
        const auto it = row.find(z);
        d.push_back(it == row.end() ? Rational(0) : it->second);
      }
      source.push_back(y);
      dense.push_back(std::move(d));
    }
    chain.kernels.push_back(Kernel::grid(std::move(source), chain.grid, std::move(dense)));
  }
  return chain;
}

JointLaw conditional_path_law(const ChainSpec& chain, std::size_t j) {
  validate_chain(chain);
  require_label(j, chain.length());
  JointLaw law;
  for (const auto& [z, p] : path_law(chain)) add_mass(law, z, Rational(p * label_weight(z, j)));
  return normalized(std::move(law));
}

CheckReport compare_chain_posterior(const ChainSpec& chain, std::size_t j, const ChainSpec& claimed) {
  CheckReport report;
  report.check = "chain-posterior";
  report.add_input("k", std::to_string(chain.length()));
  report.add_input("j", std::to_string(j));
  const JointLaw oracle = conditional_path_law(chain, j);
  try {
    validate_chain(claimed);
  } catch (const ValidationError& e) {
    report.fail("claimed posterior chain", "valid chain", e.what());
    return report;
  }
  compare_joint_laws(report, "path law", oracle, path_law(claimed));
  return report;
}

CheckReport verify_chain_posterior(const ChainSpec& chain, std::size_t j) {
  CheckReport report = compare_chain_posterior(chain, j, posterior_chain(chain, j));
  const JointLaw conditioned = conditional_path_law(chain, j);
  const std::size_t k = chain.length();
  for (std::size_t s = 0; s + 2 <= k + 1; ++s) {
    for (std::size_t t = s + 2; t <= k + 1; ++t) {
      report.absorb(check_markov_sandwich(conditioned, s, t),
                    "sandwich(" + std::to_string(s) + "," + std::to_string(t) + ")");
    }
  }
  return report;
}

CheckReport verify_neutral_update(const NeutralVector& nv, std::size_t j) {
  CheckReport report;
  report.check = "neutral-update";
  const std::size_t k = nv.laws.size();
  report.add_input("k", std::to_string(k));
  report.add_input("j", std::to_string(j));
  const NeutralVector updated = neutral_update(nv, j);

  const ChainSpec chain = chain_from_neutral(nv);
  compare_joint_laws(report, "Z path law", path_law(posterior_chain(chain, j)), path_law(chain_from_neutral(updated)));

  // Oracle over the fractions: weight each V tuple by its label probability Y_j.
  JointLaw oracle{{{}, Rational(1)}};
  for (const auto& f : nv.laws) {
    JointLaw next;
    for (const auto& [key, p] : oracle) {
      for (const auto& [v, pv] : f) {
        auto longer = key;
        longer.push_back(v);
        add_mass(next, longer, Rational(p * pv));
      }
    }
    oracle = std::move(next);
  }
  JointLaw conditioned;
  for (const auto& [v, p] : oracle) {
    Rational y = 1;
    for (std::size_t l = 1; l < j && l <= k; ++l) y *= 1 - v[l - 1];
    if (j <= k) y *= v[j - 1];
    add_mass(conditioned, v, Rational(p * y));
  }
  conditioned = normalized(std::move(conditioned));
  JointLaw product{{{}, Rational(1)}};
  for (const auto& f : updated.laws) {
    JointLaw next;
    for (const auto& [key, p] : product) {
      for (const auto& [v, pv] : f) {
        auto longer = key;
        longer.push_back(v);
        add_mass(next, longer, Rational(p * pv));
      }
    }
    product = std::move(next);
  }
  compare_joint_laws(report, "V law", conditioned, product);
  return report;
}

}  // namespace qmrpm
