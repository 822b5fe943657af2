#include "qmrpm/ntr.hpp"

#include "qmrpm/compare.hpp"
#include "qmrpm/errors.hpp"

namespace qmrpm {

namespace {

bool next_tuple(std::vector<std::size_t>& t, const std::vector<std::size_t>& sizes) {
  for (std::size_t i = t.size(); i-- > 0;) {
    if (++t[i] < sizes[i]) return true;
    t[i] = 0;
  }
  return false;
}

std::string pair_text(const RegionSet& b1, const RegionSet& b2) { return b1.to_string() + "->" + b2.to_string(); }

EntryPredicate observed(const ObservationVector& x) {
  return [x](const JointTable::Entry& e) { return e.obs == x; };
}

}  // namespace

void require_increment_law(const IncrementLaw& law) {
  for (const auto& [v, p] : law) {
    if (v < 0 || v > 1) throw ValidationError("increment value " + to_string(v) + " outside [0,1]");
    if (p < 0) throw ValidationError("negative increment probability");
  }
  if (total_mass(law) != 1) throw ValidationError("increment law sums to " + to_string(total_mass(law)));
}

Rational v_statistic(const Rational& z1, const Rational& z2) {
  if (z1 < 0 || z1 > 1 || z2 < 0 || z2 > 1) throw ValidationError("v_statistic arguments must lie in [0,1]");
  if (z2 < z1) throw ValidationError("v_statistic needs z1 <= z2, got " + to_string(z1) + " > " + to_string(z2));
  if (z1 == 1) return 1;
  return (z2 - z1) / (1 - z1);
}

Kernel kernel_from_F(const IncrementLaw& f) { return Kernel::increment(f); }

IncrementLaw increment_law_at(const Kernel& kernel, const Rational& z1) {
  if (z1 == 1) throw ValidationError("the increment law is not identified at z1 = 1");
  return pushforward(kernel.row(z1), [&](const Rational& z2) { return v_statistic(z1, z2); });
}

void FSystem::set(const RegionSet& b1, const RegionSet& b2, IncrementLaw law) {
  if (!b1.subset_of(b2)) throw ValidationError("F-system pair not nested: " + pair_text(b1, b2));
  require_increment_law(law);
  family_.insert_or_assign(Pair{b1, b2}, std::move(law));
}

bool FSystem::has(const RegionSet& b1, const RegionSet& b2) const { return family_.contains(Pair{b1, b2}); }

const IncrementLaw& FSystem::at(const RegionSet& b1, const RegionSet& b2) const {
  const auto it = family_.find(Pair{b1, b2});
  if (it == family_.end()) throw ValidationError("missing increment law for " + pair_text(b1, b2));
  return it->second;
}

std::vector<FSystem::Pair> FSystem::pairs() const {
  std::vector<Pair> out;
  for (const auto& [p, law] : family_) out.push_back(p);
  return out;
}

std::vector<std::array<RegionSet, 3>> FSystem::triples() const {
  std::vector<std::array<RegionSet, 3>> out;
  for (const auto& [p12, f12] : family_) {
    for (const auto& [p23, f23] : family_) {
      if (p12.second == p23.first && has(p12.first, p23.second)) out.push_back({p12.first, p12.second, p23.second});
    }
  }
  return out;
}

CheckReport check_ntr_system(const FSystem& fs, const RegionSet& b1, const RegionSet& b2, const RegionSet& b3) {
  CheckReport report;
  report.check = "ntr-system";
  report.add_input("triple", b1.to_string() + " <= " + b2.to_string() + " <= " + b3.to_string());
  compare_distributions(report, "F" + pair_text(b1, b3), fs.at(b1, b3),
                        convolve_increments(fs.at(b1, b2), fs.at(b2, b3)));
  return report;
}

ExtractedF extract_F_from_model(const JointTable& table, const IndexingCollection& collection,
                                const RegionSet& b1, const RegionSet& b2) {
  ExtractedF out;
  CheckReport& report = out.independence;
  report.check = "ntr-independence";
  report.add_input("pair", b1.to_string() + " <= " + b2.to_string());

  std::vector<RegionSet> inside;
  for (const auto& a : collection.members()) {
    if (a.subset_of(b1)) inside.push_back(a);
  }
  std::string names;
  for (const auto& a : inside) names += (names.empty() ? "" : ",") + a.to_string();
  report.add_input("conditioning", names);

  JointLaw joint;
  JointLaw history;
  for (std::size_t li = 0; li < table.latents().size(); ++li) {
    const Rational& w = table.latents()[li].weight;
    std::vector<Rational> key;
    for (const auto& a : inside) key.push_back(table.mass(li, a));
    const Rational v = v_statistic(table.mass(li, b1), table.mass(li, b2));
    add_mass(out.law, v, w);
    add_mass(history, key, w);
    key.push_back(v);
    add_mass(joint, key, w);
  }
  out.law = normalized(std::move(out.law));
  history = normalized(std::move(history));
  joint = normalized(std::move(joint));

  JointLaw product;
  for (const auto& [h, ph] : history) {
    for (const auto& [v, pv] : out.law) {
      auto key = h;
      key.push_back(v);
      add_mass(product, key, Rational(ph * pv));
    }
  }
  compare_joint_laws(report, "joint of (history, V)", product, joint);
  return out;
}

SampleSpace NtrChainPrior::cell_space() const {
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= length() + 1; ++j) labels.push_back("C" + std::to_string(j));
  return SampleSpace(std::move(labels));
}

std::vector<RegionSet> NtrChainPrior::regions(const SampleSpace& cells) const {
  std::vector<RegionSet> out;
  for (std::size_t j = 0; j <= length() + 1; ++j) {
    out.emplace_back(cells, j >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << j) - 1);
  }
  return out;
}

void validate_ntr_prior(const NtrChainPrior& prior) {
  if (prior.increments.empty()) throw ValidationError("NTR chain prior needs at least one increment");
  if (prior.length() + 1 > SampleSpace::kMaxAtoms) throw ValidationError("NTR chain too long");
  for (std::size_t j = 0; j < prior.length(); ++j) {
    require_increment_law(prior.increments[j]);
    // Once P_{B_j} = 1 every later normalized increment is 1, so only the last step may reach 1.
    if (j + 1 < prior.length() && prior.increments[j].contains(Rational(1))) {
      throw ValidationError("increment " + std::to_string(j + 1) + " puts mass on 1 before the last step");
    }
  }
}

JointTable enumerate_ntr_joint(const NtrChainPrior& prior, std::size_t n, std::uint64_t budget) {
  validate_ntr_prior(prior);
  const SampleSpace cells = prior.cell_space();
  const std::size_t k = prior.length();
  std::vector<std::vector<std::pair<Rational, Rational>>> supports;
  std::vector<std::size_t> sizes;
  std::uint64_t count = 1;
  for (const auto& f : prior.increments) {
    supports.emplace_back(f.begin(), f.end());
    sizes.push_back(f.size());
    count = count > budget ? count : count * f.size();
  }
  if (count > budget) throw ResourceError("NTR latent enumeration exceeds budget", count, budget);

  std::vector<Latent> latents;
  std::vector<std::size_t> idx(k, 0);
  do {
    Latent l{idx, {}, Rational(1)};
    Rational z = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& [v, p] = supports[j][idx[j]];
      const Rational next = z + (1 - z) * v;
      l.atom_mass.push_back(next - z);
      l.weight *= p;
      z = next;
    }
    l.atom_mass.push_back(1 - z);
    latents.push_back(std::move(l));
  } while (next_tuple(idx, sizes));
  return JointTable::from_latents(cells, std::move(latents), n, budget);
}

FSystem prior_f_system(const NtrChainPrior& prior, const SampleSpace& cells) {
  validate_ntr_prior(prior);
  const auto r = prior.regions(cells);
  const std::size_t k = prior.length();
  FSystem fs;
  for (std::size_t i = 0; i <= k; ++i) {
    IncrementLaw acc = point_mass(Rational(0));
    for (std::size_t j = i + 1; j <= k; ++j) {
      acc = convolve_increments(acc, prior.increments[j - 1]);
      fs.set(r[i], r[j], acc);
    }
    fs.set(r[i], r[k + 1], point_mass(Rational(1)));
  }
  return fs;
}

IncrementLaw posterior_increment_law(const JointTable& table, const RegionSet& b1, const RegionSet& b2,
                                     const ObservationVector& x) {
  const JointLaw law = conditional_table(table, observed(x), [&](const JointTable::Entry& e) {
    return std::vector<Rational>{v_statistic(table.mass(e, b1), table.mass(e, b2))};
  });
  IncrementLaw out;
  for (const auto& [key, p] : law) add_mass(out, key[0], p);
  return out;
}

CheckReport verify_ntr_posterior(const NtrChainPrior& prior, const ObservationVector& x, std::uint64_t budget) {
  CheckReport report;
  report.check = "ntr-posterior";
  report.add_input("k", std::to_string(prior.length()));
  const JointTable table = enumerate_ntr_joint(prior, x.size(), budget);
  const SampleSpace& cells = table.space();
  report.add_input("x", describe_observations(cells, x));
  if (table.observation_probability(x) == 0) {
    throw UndefinedConditional("observation " + describe_observations(cells, x) + " has probability zero");
  }
  const auto r = prior.regions(cells);
  const std::size_t R = r.size();
  const FSystem prior_fs = prior_f_system(prior, cells);

  std::map<std::pair<std::size_t, std::size_t>, IncrementLaw> fx;
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = i + 1; j < R; ++j) fx[{i, j}] = posterior_increment_law(table, r[i], r[j], x);
  }

  // (i) kernel form.
  for (const auto& [ij, f] : fx) {
    const Kernel q = posterior_kernel(table, r[ij.first], r[ij.second], x).kernel;
    for (const auto& z1 : q.as_grid()->source) {
      compare_distributions(report, "(i) " + pair_text(r[ij.first], r[ij.second]) + " z1=" + to_string(z1),
                            shift_increment(f, z1), q.row(z1));
    }
  }

  // (ii) convolution closure.
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t j = i + 1; j < R; ++j) {
      for (std::size_t l = j + 1; l < R; ++l) {
        compare_distributions(report, "(ii) " + r[i].to_string() + "->" + r[j].to_string() + "->" + r[l].to_string(),
                              fx.at({i, l}), convolve_increments(fx.at({i, j}), fx.at({j, l})));
      }
    }
  }

  // (iii) observations inside B_i do not matter.
  for (const auto& [ij, f] : fx) {
    const RegionSet& b1 = r[ij.first];
    const std::string pair = pair_text(r[ij.first], r[ij.second]);
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
    std::vector<std::size_t> pick(x.size(), 0), sizes;
    for (const auto& c : choices) sizes.push_back(c.size());
    do {
      ObservationVector alt(x.size());
      for (std::size_t c = 0; c < x.size(); ++c) alt[c] = choices[c][pick[c]];
      if (alt != x && table.observation_probability(alt) > 0) {
        compare_distributions(report, "(iii) " + pair + " x'=" + describe_observations(cells, alt), f,
                              posterior_increment_law(table, r[ij.first], r[ij.second], alt));
      }
    } while (next_tuple(pick, sizes));
    if (all_inside) compare_distributions(report, "(iii) prior " + pair, prior_fs.at(r[ij.first], r[ij.second]), f);
  }

  // (iv) mutual independence of the posterior increments along the chain.
  {
    const std::size_t k = prior.length();
    const JointLaw joint = conditional_table(table, observed(x), [&](const JointTable::Entry& e) {
      std::vector<Rational> v;
      for (std::size_t j = 1; j <= k; ++j) v.push_back(v_statistic(table.mass(e, r[j - 1]), table.mass(e, r[j])));
      return v;
    });
    JointLaw product{{{}, Rational(1)}};
    for (std::size_t j = 1; j <= k; ++j) {
      JointLaw next;
      for (const auto& [key, p] : product) {
        for (const auto& [v, pv] : fx.at({j - 1, j})) {
          auto longer = key;
          longer.push_back(v);
          add_mass(next, longer, Rational(p * pv));
        }
      }
      product = std::move(next);
    }
    compare_joint_laws(report, "(iv) increments", product, joint);
  }
  return report;
}

IncrementLaw posterior_outside(const JointTable& prior_table, const RegionSet& b1, const RegionSet& b2,
                               const ObservationVector& x) {
  const RegionSet middle = b2.minus(b1);
  unsigned m = 0;
  for (auto a : x) {
    if (middle.contains(a)) {
      throw ValidationError("observation " + prior_table.space().label(a) + " lies in " + middle.to_string());
    }
    if (!b2.contains(a)) ++m;
  }
  IncrementLaw law;
  for (std::size_t li = 0; li < prior_table.latents().size(); ++li) {
    const Rational z2 = prior_table.mass(li, b2);
    add_mass(law, v_statistic(prior_table.mass(li, b1), z2),
             Rational(prior_table.latents()[li].weight * power(1 - z2, m)));
  }
  return normalized(std::move(law));
}

CheckReport verify_outside_formula(const JointTable& prior_table, const JointTable& table, const RegionSet& b1,
                                   const RegionSet& b2, const ObservationVector& x) {
  CheckReport report;
  report.check = "outside-formula";
  report.add_input("pair", b1.to_string() + " <= " + b2.to_string());
  report.add_input("x", describe_observations(table.space(), x));
  compare_distributions(report, "F^(x)" + pair_text(b1, b2), posterior_outside(prior_table, b1, b2, x),
                        posterior_increment_law(table, b1, b2, x));
  return report;
}

}  // namespace qmrpm
