#include "qmrpm/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qmrpm/compare.hpp"
#include "qmrpm/errors.hpp"

namespace qmrpm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// base^exp, saturating at UINT64_MAX.
std::uint64_t saturating_power(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

// Advances an odometer over {0..base-1}^len; false after the last tuple.
bool next_tuple(std::vector<std::size_t>& t, std::size_t base) {
  for (std::size_t i = t.size(); i-- > 0;) {
    if (++t[i] < base) return true;
    t[i] = 0;
  }
  return false;
}

std::string tuple_name(const SampleSpace& space, const std::vector<std::size_t>& x) {
  std::string s = "X=(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) s += ",";
    s += space.label(x[i]);
  }
  return s + ")";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::size_t categorical(std::mt19937_64& gen, const std::vector<double>& weights, double total) {
  const double u = uniform01(gen) * total;
  double acc = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

constexpr std::uint64_t kSampleBlocks = 64;

}  // namespace

RpmModel RpmModel::dirichlet(Measure alpha) {
  alpha.require_positive_total();
  return RpmModel(DirichletModel{std::move(alpha)});
}

RpmModel RpmModel::empirical_fixed(Measure p0, unsigned N) {
  p0.require_probability();
  if (N == 0) throw ValidationError("N must be positive");
  return RpmModel(EmpiricalFixedModel{std::move(p0), N});
}

RpmModel RpmModel::empirical_dirichlet(Measure alpha, unsigned N) {
  alpha.require_positive_total();
  if (N == 0) throw ValidationError("N must be positive");
  return RpmModel(EmpiricalDirichletModel{std::move(alpha), N});
}

const SampleSpace& RpmModel::space() const { return measure().space(); }

const Measure& RpmModel::measure() const {
  return std::visit(overloaded{[](const DirichletModel& m) -> const Measure& { return m.alpha; },
                               [](const EmpiricalFixedModel& m) -> const Measure& { return m.p0; },
                               [](const EmpiricalDirichletModel& m) -> const Measure& { return m.alpha; }},
                    v_);
}

std::string RpmModel::kind() const {
  return std::visit(overloaded{[](const DirichletModel&) { return std::string("dirichlet"); },
                               [](const EmpiricalFixedModel&) { return std::string("empirical-fixed"); },
                               [](const EmpiricalDirichletModel&) { return std::string("empirical-dirichlet"); }},
                    v_);
}

bool RpmModel::finite_latent() const noexcept { return !std::holds_alternative<DirichletModel>(v_); }

unsigned RpmModel::draws() const {
  if (const auto* m = std::get_if<EmpiricalFixedModel>(&v_)) return m->N;
  if (const auto* m = std::get_if<EmpiricalDirichletModel>(&v_)) return m->N;
  throw ValidationError("the Dirichlet model has no finite latent draws");
}

JointTable JointTable::from_latents(SampleSpace space, std::vector<Latent> latents, std::size_t n,
                                    std::uint64_t budget, unsigned jobs) {
  std::erase_if(latents, [](const Latent& l) { return l.weight == 0; });
  for (const auto& l : latents) {
    if (l.atom_mass.size() != space.size()) throw ValidationError("latent atom masses do not match the space");
  }
  const std::uint64_t required = saturating_mul(latents.size(), saturating_power(space.size(), n));
  if (required > budget) throw ResourceError("joint table enumeration exceeds budget", required, budget);

  JointTable t;
  t.space_ = std::move(space);
  t.n_ = n;
  t.latents_ = std::move(latents);

  const std::size_t atoms = t.space_.size();
  auto expand = [&](std::size_t begin, std::size_t end, std::vector<Entry>& out) {
    for (std::size_t li = begin; li < end; ++li) {
      const Latent& l = t.latents_[li];
      std::vector<std::size_t> x(n, 0);
      do {
        Rational p = l.weight;
        for (auto a : x) {
          p *= l.atom_mass[a];
          if (p == 0) break;
        }
        if (p != 0) out.push_back({li, x, p});
      } while (next_tuple(x, atoms));
    }
  };

  const std::size_t L = t.latents_.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(L)));
  if (workers == 1) {
    expand(0, L, t.entries_);
  } else {
    std::vector<std::vector<Entry>> parts(workers);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] { expand(L * w / workers, L * (w + 1) / workers, parts[w]); });
    }
    for (auto& th : threads) th.join();
    for (auto& part : parts) {
      t.entries_.insert(t.entries_.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
    }
  }
  return t;
}

Rational JointTable::mass(std::size_t latent, const RegionSet& region) const {
  const auto& m = latents_.at(latent).atom_mass;
  Rational sum = 0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (region.contains(a)) sum += m[a];
  }
  return sum;
}

Rational JointTable::observation_probability(const std::vector<std::size_t>& x) const {
  Rational sum = 0;
  for (const auto& l : latents_) {
    Rational p = l.weight;
    for (auto a : x) p *= l.atom_mass.at(a);
    sum += p;
  }
  return sum;
}

std::vector<Latent> enumerate_latents(const RpmModel& model, std::uint64_t budget) {
  const unsigned N = model.draws();
  const SampleSpace& space = model.space();
  const std::uint64_t required = saturating_power(space.size(), N);
  if (required > budget) throw ResourceError("latent enumeration exceeds budget", required, budget);

  const Measure& m = model.measure();
  const bool polya = std::holds_alternative<EmpiricalDirichletModel>(model.variant());
  const Rational total = m.total();
  const Rational unit = make_rational(1, N);

  std::vector<Latent> out;
  std::vector<std::size_t> draws(N, 0);
  do {
    Latent l{draws, std::vector<Rational>(space.size(), Rational(0)), Rational(1)};
    std::vector<unsigned> seen(space.size(), 0);
    for (unsigned j = 0; j < N; ++j) {
      const std::size_t a = draws[j];
      if (polya) {
        l.weight *= (m[a] + seen[a]) / (total + j);
      } else {
        l.weight *= m[a];
      }
      ++seen[a];
      l.atom_mass[a] += unit;
    }
    if (l.weight != 0) out.push_back(std::move(l));
  } while (next_tuple(draws, space.size()));
  return out;
}

JointTable enumerate_joint(const RpmModel& model, std::size_t n, std::uint64_t budget, unsigned jobs) {
  if (!model.finite_latent()) {
    throw ValidationError("the Dirichlet model has no finite joint table; use moment checks");
  }
  return JointTable::from_latents(model.space(), enumerate_latents(model, budget), n, budget, jobs);
}

Rational dirichlet_atom_moment(const Measure& alpha, const std::vector<unsigned>& exponents) {
  if (exponents.size() != alpha.space().size()) throw ValidationError("exponent vector size mismatch");
  Rational num = 1;
  unsigned K = 0;
  for (std::size_t a = 0; a < exponents.size(); ++a) {
    num *= rising_factorial(alpha[a], exponents[a]);
    K += exponents[a];
  }
  return num / rising_factorial(alpha.total(), K);
}

Rational mixed_moment(const RpmModel& model, const std::vector<RegionSet>& factors) {
  if (factors.empty()) throw ValidationError("moment query needs at least one factor");
  for (const auto& f : factors) {
    if (!(f.space() == model.space())) throw ValidationError("moment factor over a different space");
  }
  if (const auto* d = std::get_if<DirichletModel>(&model.variant())) {
    // Expand each P_A into its atoms and group the resulting monomials by exponent vector.
    std::map<std::vector<unsigned>, Rational> monomials{{std::vector<unsigned>(model.space().size(), 0), 1}};
    for (const auto& f : factors) {
      std::map<std::vector<unsigned>, Rational> next;
      for (const auto& [exp, c] : monomials) {
        for (auto a : f.atoms()) {
          auto e = exp;
          ++e[a];
          next[e] += c;
        }
      }
      monomials = std::move(next);
    }
    Rational sum = 0;
    for (const auto& [exp, c] : monomials) sum += c * dirichlet_atom_moment(d->alpha, exp);
    return sum;
  }
  Rational sum = 0;
  const JointTable table = enumerate_joint(model, 0);
  for (std::size_t li = 0; li < table.latents().size(); ++li) {
    Rational p = table.latents()[li].weight;
    for (const auto& f : factors) p *= table.mass(li, f);
    sum += p;
  }
  return sum;
}

JointLaw conditional_table(const JointTable& table, const EntryPredicate& condition,
                           const EntryStatistic& statistic) {
  JointLaw law;
  for (const auto& e : table.entries()) {
    if (condition(e)) add_mass(law, statistic(e), e.prob);
  }
  return normalized(std::move(law));
}

Kernel prior_kernel(const RpmModel& model, const RegionSet& b1, const RegionSet& b2) {
  if (!b1.subset_of(b2)) {
    throw ValidationError("kernel regions not nested: " + b1.to_string() + " within " + b2.to_string());
  }
  if (b1 == b2) return Kernel::identity();
  return std::visit(overloaded{[&](const DirichletModel& m) { return dirichlet_kernel(m.alpha, b1, b2); },
                               [&](const EmpiricalFixedModel& m) { return empirical_kernel(m.p0, m.N, b1, b2); },
                               [&](const EmpiricalDirichletModel& m) {
                                 return polya_kernel(m.alpha, m.N, b1, b2);
                               }},
                    model.variant());
}

TransitionSystem build_transition_system(const RpmModel& model, const std::vector<RegionSet>& regions) {
  TransitionSystem system;
  for (const auto& b1 : regions) {
    for (const auto& b2 : regions) {
      if (b1.subset_of(b2)) system.set(b1, b2, prior_kernel(model, b1, b2));
    }
  }
  return system;
}

SampleFrequencies sample_paths(const RpmModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t reps, const std::vector<RegionSet>& regions,
                               unsigned jobs) {
  if (reps == 0) throw ValidationError("reps must be positive");
  const SampleSpace& space = model.space();
  const std::size_t atoms = space.size();
  const bool dirichlet = !model.finite_latent();
  const unsigned N = dirichlet ? 0 : model.draws();

  std::vector<double> base(atoms);
  for (std::size_t a = 0; a < atoms; ++a) base[a] = to_double(model.measure()[a]);
  const double base_total = to_double(model.measure().total());

  const std::uint64_t obs_events = n == 0 ? 0 : saturating_power(atoms, n);
  const std::size_t region_events = dirichlet ? 0 : regions.size() * (N + 1);

  auto run_block = [&](std::uint64_t block, std::vector<std::uint64_t>& counts) {
    const std::uint64_t count = reps / kSampleBlocks + (block < reps % kSampleBlocks ? 1 : 0);
    std::mt19937_64 gen(splitmix64(seed ^ splitmix64(block + 1)));
    std::vector<std::size_t> draws(N);
    std::vector<unsigned> tally(atoms);
    std::vector<double> weights(atoms);
    for (std::uint64_t r = 0; r < count; ++r) {
      std::fill(tally.begin(), tally.end(), 0);
      double total = 0;
      if (dirichlet) {
        for (std::size_t a = 0; a < atoms; ++a) {
          weights[a] = base[a] > 0 ? std::gamma_distribution<double>(base[a], 1.0)(gen) : 0.0;
          total += weights[a];
        }
      } else {
        const bool polya = std::holds_alternative<EmpiricalDirichletModel>(model.variant());
        for (unsigned j = 0; j < N; ++j) {
          if (polya) {
            for (std::size_t a = 0; a < atoms; ++a) weights[a] = base[a] + tally[a];
            draws[j] = categorical(gen, weights, base_total + j);
          } else {
            draws[j] = categorical(gen, base, base_total);
          }
          ++tally[draws[j]];
        }
        for (std::size_t ri = 0; ri < regions.size(); ++ri) {
          unsigned m = 0;
          for (std::size_t a = 0; a < atoms; ++a) {
            if (regions[ri].contains(a)) m += tally[a];
          }
          ++counts[ri * (N + 1) + m];
        }
      }
      if (n > 0) {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t x = dirichlet ? categorical(gen, weights, total)
                                          : draws[static_cast<std::size_t>(uniform01(gen) * N)];
          code = code * atoms + x;
        }
        ++counts[region_events + code];
      }
    }
  };

  const std::size_t width = region_events + obs_events;
  std::vector<std::vector<std::uint64_t>> per_worker;
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, kSampleBlocks));
  per_worker.assign(workers, std::vector<std::uint64_t>(width, 0));
  auto work = [&](unsigned w) {
    for (std::uint64_t b = w; b < kSampleBlocks; b += workers) run_block(b, per_worker[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& th : threads) th.join();
  }

  SampleFrequencies out;
  out.reps = reps;
  std::vector<std::uint64_t> counts(width, 0);
  for (const auto& part : per_worker) {
    for (std::size_t i = 0; i < width; ++i) counts[i] += part[i];
  }
  for (std::size_t ri = 0; ri < regions.size() && !dirichlet; ++ri) {
    for (unsigned m = 0; m <= N; ++m) {
      const std::uint64_t c = counts[ri * (N + 1) + m];
      if (c > 0) out.counts["P" + regions[ri].to_string() + "=" + to_string(make_rational(m, N))] = c;
    }
  }
  std::vector<std::size_t> x(n, 0);
  for (std::uint64_t code = 0; code < obs_events; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = n; i-- > 0;) {
      x[i] = rest % atoms;
      rest /= atoms;
    }
    if (counts[region_events + code] > 0) out.counts[tuple_name(space, x)] = counts[region_events + code];
  }
  return out;
}

CheckReport verify_monte_carlo(const RpmModel& model, std::size_t n, std::uint64_t seed,
                               std::uint64_t reps, const std::vector<RegionSet>& regions,
                               std::uint64_t budget, unsigned jobs) {
  CheckReport report;
  report.check = "monte-carlo";
  report.add_input("model", model.kind());
  report.add_input("n", std::to_string(n));
  report.add_input("seed", std::to_string(seed));
  report.add_input("reps", std::to_string(reps));

  std::map<std::string, Rational> oracle;
  const SampleSpace& space = model.space();
  if (model.finite_latent()) {
    const JointTable table = enumerate_joint(model, n, budget, jobs);
    const unsigned N = model.draws();
    for (const auto& r : regions) {
      for (unsigned m = 0; m <= N; ++m) oracle["P" + r.to_string() + "=" + to_string(make_rational(m, N))] = 0;
      for (std::size_t li = 0; li < table.latents().size(); ++li) {
        oracle["P" + r.to_string() + "=" + to_string(table.mass(li, r))] += table.latents()[li].weight;
      }
    }
    if (n > 0) {
      std::vector<std::size_t> x(n, 0);
      do {
        oracle[tuple_name(space, x)] = table.observation_probability(x);
      } while (next_tuple(x, space.size()));
    }
  } else if (n > 0) {
    const Measure& alpha = model.measure();
    std::vector<std::size_t> x(n, 0);
    do {
      std::vector<unsigned> exp(space.size(), 0);
      for (auto a : x) ++exp[a];
      oracle[tuple_name(space, x)] = dirichlet_atom_moment(alpha, exp);
    } while (next_tuple(x, space.size()));
  }

  const SampleFrequencies freq = sample_paths(model, n, seed, reps, regions, jobs);
  double max_z = 0;
  for (const auto& [event, p] : oracle) {
    ++report.comparisons;
    const auto it = freq.counts.find(event);
    const std::uint64_t c = it == freq.counts.end() ? 0 : it->second;
    const Rational observed(mpz_class(std::to_string(c)), mpz_class(std::to_string(reps)));
    const Rational d = abs_diff(observed, p);
    if (d > report.max_discrepancy) report.max_discrepancy = d;
    const double pd = to_double(p);
    const double sigma = std::sqrt(pd * (1 - pd) / static_cast<double>(reps));
    bool ok;
    if (sigma == 0) {
      ok = d == 0;
    } else {
      const double z = std::abs(to_double(observed) - pd) / sigma;
      max_z = std::max(max_z, z);
      ok = z <= 3.0;
    }
    if (!ok) report.fail(event, to_string(p), std::to_string(c) + "/" + std::to_string(reps), d);
  }
  report.max_abs_z = max_z;
  return report;
}

CheckReport verify_c1_c3(const RpmModel& model, const std::vector<RegionSet>& chain, std::uint64_t budget) {
  CheckReport report;
  report.check = "c1-c3";
  report.add_input("model", model.kind());
  std::string chain_text;
  for (const auto& b : chain) chain_text += (chain_text.empty() ? "" : " <= ") + b.to_string();
  report.add_input("chain", chain_text);

  if (!model.finite_latent()) throw ValidationError("C1/C3 checks need a finite-latent model");
  const ChainPartition part = partition_chain(chain);
  const JointTable table = enumerate_joint(model, 0, budget);
  const std::size_t K = part.cells.size();
  const unsigned N = model.draws();
  const Measure& m = model.measure();
  const bool polya = std::holds_alternative<EmpiricalDirichletModel>(model.variant());

  // Closed-form cell law: multinomial(N; P0(C_j)) or Dirichlet-multinomial(N; alpha(C_j)).
  JointLaw closed;
  {
    std::vector<Rational> cell_weight;
    for (const auto& c : part.cells) cell_weight.push_back(m.of(c));
    std::vector<unsigned> counts(K, 0);
    auto recurse = [&](auto&& self, std::size_t j, unsigned left) -> void {
      if (j + 1 == K) {
        counts[j] = left;
        Rational p = 1;
        unsigned used = 0;
        for (std::size_t i = 0; i < K; ++i) {
          p *= binomial(used + counts[i], counts[i]);
          used += counts[i];
          p *= polya ? rising_factorial(cell_weight[i], counts[i]) : power(cell_weight[i], counts[i]);
        }
        if (polya) p /= rising_factorial(m.total(), N);
        std::vector<Rational> key;
        for (auto c : counts) key.push_back(make_rational(c, N));
        add_mass(closed, key, p);
        return;
      }
      for (unsigned c = 0; c <= left; ++c) {
        counts[j] = c;
        self(self, j + 1, left - c);
      }
    };
    recurse(recurse, 0, N);
  }

  JointLaw cells;
  for (std::size_t li = 0; li < table.latents().size(); ++li) {
    std::vector<Rational> key;
    for (const auto& c : part.cells) key.push_back(table.mass(li, c));
    add_mass(cells, key, table.latents()[li].weight);
  }
  compare_joint_laws(report, "C1 cell law", closed, cells);

  // Every choice of endpoints 1 <= i_1 < ... < i_m <= K groups consecutive cells.
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << K); ++mask) {
    std::vector<RegionSet> unions;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::size_t start = 0;
    for (std::size_t i = 0; i < K; ++i) {
      if ((mask >> i) & 1U) {
        RegionSet u = RegionSet::empty(model.space());
        for (std::size_t j = start; j <= i; ++j) u = u | part.cells[j];
        unions.push_back(u);
        ranges.emplace_back(start, i);
        start = i + 1;
      }
    }
    JointLaw pushed;
    for (const auto& [key, p] : closed) {
      std::vector<Rational> sums;
      for (const auto& [lo, hi] : ranges) {
        Rational s = 0;
        for (std::size_t j = lo; j <= hi; ++j) s += key[j];
        sums.push_back(s);
      }
      add_mass(pushed, sums, p);
    }
    JointLaw direct;
    for (std::size_t li = 0; li < table.latents().size(); ++li) {
      std::vector<Rational> key;
      for (const auto& u : unions) key.push_back(table.mass(li, u));
      add_mass(direct, key, table.latents()[li].weight);
    }
    std::string where = "C1 grouping";
    for (const auto& u : unions) where += " " + u.to_string();
    compare_joint_laws(report, where, pushed, direct);
  }

  // C3 along the chain B_1..B_k (cells C_1..C_k).
  const std::size_t k = part.chain.size();
  for (std::size_t i = 1; i < k; ++i) {
    const Kernel q = prior_kernel(model, part.chain[i - 1], part.chain[i]);
    std::map<std::vector<Rational>, Distribution> by_history;
    for (const auto& [key, p] : cells) {
      std::vector<Rational> history(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(i));
      add_mass(by_history[history], key[i], p);
    }
    for (const auto& [history, law] : by_history) {
      Rational y = 0;
      for (const auto& h : history) y += h;
      const Distribution conditional =
          pushforward(normalized(law), [&](const Rational& v) { return Rational(y + v); });
      const std::string where = "C3 step " + std::to_string(i + 1) + " history " + describe(history);
      if (!q.defined_at(y)) {
        report.fail(where, "kernel row at " + to_string(y), "no row");
        continue;
      }
      compare_distributions(report, where, q.row(y), conditional);
    }
  }
  return report;
}

CheckReport check_markov_sandwich(const JointLaw& path, std::size_t s, std::size_t t) {
  CheckReport report;
  report.check = "markov-sandwich";
  report.add_input("s", std::to_string(s));
  report.add_input("t", std::to_string(t));
  if (path.empty()) throw ValidationError("empty path law");
  const std::size_t k = path.begin()->first.size();
  if (!(s < t && t <= k + 1)) throw ValidationError("sandwich indices out of range");

  // outside configuration -> middle -> mass, and (Z_s, Z_t) -> middle -> mass.
  std::map<std::vector<Rational>, JointLaw> given_outside;
  std::map<std::vector<Rational>, JointLaw> given_ends;
  for (const auto& [z, p] : path) {
    std::vector<Rational> ext;
    ext.reserve(k + 2);
    ext.emplace_back(0);
    ext.insert(ext.end(), z.begin(), z.end());
    ext.emplace_back(1);
    std::vector<Rational> outside, middle;
    for (std::size_t i = 0; i < ext.size(); ++i) (i > s && i < t ? middle : outside).push_back(ext[i]);
    add_mass(given_outside[outside], middle, p);
    add_mass(given_ends[{ext[s], ext[t]}], middle, p);
  }
  for (const auto& [outside, law] : given_outside) {
    const Rational& zs = outside[s];
    const Rational& zt = outside[s + 1];
    compare_joint_laws(report, "outside " + describe(outside), normalized(given_ends.at({zs, zt})),
                       normalized(law));
  }
  return report;
}

}  // namespace qmrpm
