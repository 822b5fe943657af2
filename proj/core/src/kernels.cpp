#include "qmrpm/kernels.hpp"

#include <algorithm>
#include <set>

#include "qmrpm/errors.hpp"

namespace qmrpm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unit_interval(const Rational& v, const char* what) {
  if (v < 0 || v > 1) throw ValidationError(std::string(what) + " value " + to_string(v) + " outside [0,1]");
}

void require_sorted_grid(const std::vector<Rational>& grid, const char* what) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_unit_interval(grid[i], what);
    if (i > 0 && !(grid[i - 1] < grid[i])) {
      throw ValidationError(std::string(what) + " support is not strictly increasing");
    }
  }
}

void validate_increment(const Distribution& law) {
  for (const auto& [v, p] : law) {
    require_unit_interval(v, "increment");
    if (p < 0) throw ValidationError("negative increment probability");
  }
  if (total_mass(law) != 1) {
    throw ValidationError("increment law sums to " + to_string(total_mass(law)));
  }
}

std::vector<Rational> uniform_grid(unsigned N) {
  std::vector<Rational> g;
  for (unsigned m = 0; m <= N; ++m) g.push_back(make_rational(m, N));
  return g;
}

// Shared construction for the two count-based kernels. `weight(d, region_mass)` supplies
// p^d (empirical) or alpha^[d] (Polya).
template <class Weight>
Kernel count_kernel(const Measure& measure, unsigned N, const RegionSet& b1, const RegionSet& b2,
                    Weight weight) {
  if (N == 0) throw ValidationError("N must be positive");
  if (!b1.subset_of(b2)) {
    throw ValidationError("kernel regions not nested: " + b1.to_string() + " within " + b2.to_string());
  }
  const RegionSet c = b2.minus(b1);
  const Rational in_b1 = measure.of(b1);
  const Rational out_b1 = measure.of(b1.complement());
  const Rational in_c = measure.of(c);
  const Rational out_b2 = measure.of(b2.complement());

  std::vector<Rational> source;
  std::vector<std::vector<Rational>> rows;
  for (unsigned m1 = 0; m1 <= N; ++m1) {
    const bool positive = (in_b1 > 0 || m1 == 0) && (out_b1 > 0 || m1 == N);
    if (!positive) continue;
    std::vector<Rational> row(N + 1, Rational(0));
    const Rational denom = weight(N - m1, out_b1);
    for (unsigned m2 = m1; m2 <= N; ++m2) {
      row[m2] = binomial(N - m1, m2 - m1) * weight(m2 - m1, in_c) * weight(N - m2, out_b2) / denom;
    }
    source.push_back(make_rational(m1, N));
    rows.push_back(std::move(row));
  }
  return Kernel::grid(std::move(source), uniform_grid(N), std::move(rows));
}

}  // namespace

std::optional<std::size_t> GridKernel::source_index(const Rational& z1) const {
  const auto it = std::lower_bound(source.begin(), source.end(), z1);
  if (it == source.end() || *it != z1) return std::nullopt;
  return static_cast<std::size_t>(it - source.begin());
}

Kernel Kernel::grid(std::vector<Rational> source, std::vector<Rational> target,
                    std::vector<std::vector<Rational>> rows) {
  require_sorted_grid(source, "source");
  require_sorted_grid(target, "target");
  if (rows.size() != source.size()) throw ValidationError("grid kernel row count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != target.size()) throw ValidationError("grid kernel row width mismatch");
    Rational sum = 0;
    for (const auto& p : rows[i]) {
      if (p < 0) throw ValidationError("negative kernel entry");
      sum += p;
    }
    if (sum != 1) {
      throw ValidationError("kernel row at " + to_string(source[i]) + " sums to " + to_string(sum));
    }
  }
  return Kernel(GridKernel{std::move(source), std::move(target), std::move(rows)});
}

Kernel Kernel::scaled_beta(Rational a, Rational b) {
  if (a < 0 || b < 0) throw ValidationError("Beta parameters must be nonnegative");
  if (a == 0 && b == 0) return Kernel(ScaledBeta{a, b});  // a = 0 takes precedence: identity step
  return Kernel(ScaledBeta{std::move(a), std::move(b)});
}

Kernel Kernel::beta_chain(std::vector<ScaledBeta> factors) {
  for (const auto& f : factors) {
    if (f.a < 0 || f.b < 0) throw ValidationError("Beta parameters must be nonnegative");
  }
  return Kernel(BetaChain{std::move(factors)});
}

Kernel Kernel::increment(Distribution law) {
  validate_increment(law);
  return Kernel(IncrementKernel{std::move(law)});
}

std::string Kernel::kind() const {
  return std::visit(overloaded{[](const IdentityKernel&) { return std::string("identity"); },
                               [](const GridKernel&) { return std::string("grid"); },
                               [](const ScaledBeta&) { return std::string("beta"); },
                               [](const BetaChain&) { return std::string("beta-chain"); },
                               [](const IncrementKernel&) { return std::string("increment"); }},
                    v_);
}

bool Kernel::is_discrete() const noexcept {
  return std::holds_alternative<IdentityKernel>(v_) || std::holds_alternative<GridKernel>(v_) ||
         std::holds_alternative<IncrementKernel>(v_);
}

bool Kernel::has_increment_moments() const noexcept { return !std::holds_alternative<GridKernel>(v_); }

bool Kernel::defined_at(const Rational& z1) const {
  if (const auto* g = as_grid()) return g->source_index(z1).has_value();
  return z1 >= 0 && z1 <= 1;
}

Distribution Kernel::row(const Rational& z1) const {
  require_unit_interval(z1, "kernel source");
  return std::visit(
      overloaded{[&](const IdentityKernel&) { return point_mass(z1); },
                 [&](const GridKernel& g) {
                   const auto i = g.source_index(z1);
                   if (!i) {
                     throw UndefinedConditional("kernel has no row at " + to_string(z1) +
                                                " (zero prior probability)");
                   }
                   Distribution out;
                   for (std::size_t t = 0; t < g.target.size(); ++t) add_mass(out, g.target[t], g.rows[*i][t]);
                   return out;
                 },
                 [&](const ScaledBeta&) -> Distribution {
                   throw ValidationError("scaled-Beta kernels have no discrete rows");
                 },
                 [&](const BetaChain&) -> Distribution {
                   throw ValidationError("scaled-Beta kernels have no discrete rows");
                 },
                 [&](const IncrementKernel& k) { return shift_increment(k.increment, z1); }},
      v_);
}

Rational Kernel::one_minus_v_moment(unsigned k) const {
  return std::visit(
      overloaded{[&](const IdentityKernel&) { return Rational(1); },
                 [&](const GridKernel&) -> Rational {
                   throw ValidationError("grid kernels have no z1-free increment moments");
                 },
                 [&](const ScaledBeta& b) { return beta_one_minus_v_moment(b, k); },
                 [&](const BetaChain& c) {
                   Rational m = 1;
                   for (const auto& f : c.factors) m *= beta_one_minus_v_moment(f, k);
                   return m;
                 },
                 [&](const IncrementKernel& inc) {
                   return expectation(inc.increment, [&](const Rational& v) { return power(1 - v, k); });
                 }},
      v_);
}

Rational rising_factorial(const Rational& a, unsigned k) {
  Rational r = 1;
  for (unsigned i = 0; i < k; ++i) r *= a + i;
  return r;
}

Rational binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return Rational(c);
}

Rational beta_one_minus_v_moment(const ScaledBeta& beta, unsigned k) {
  if (k == 0 || beta.a == 0) return 1;
  if (beta.b == 0) return 0;
  return rising_factorial(beta.b, k) / rising_factorial(beta.a + beta.b, k);
}

Kernel empirical_kernel(const Measure& p0, unsigned N, const RegionSet& b1, const RegionSet& b2) {
  p0.require_probability();
  return count_kernel(p0, N, b1, b2, [](unsigned d, const Rational& p) { return power(p, d); });
}

Kernel polya_kernel(const Measure& alpha, unsigned N, const RegionSet& b1, const RegionSet& b2) {
  alpha.require_positive_total();
  return count_kernel(alpha, N, b1, b2,
                      [](unsigned d, const Rational& a) { return rising_factorial(a, d); });
}

Kernel dirichlet_kernel(const Measure& alpha, const RegionSet& b1, const RegionSet& b2) {
  alpha.require_positive_total();
  if (!b1.subset_of(b2)) {
    throw ValidationError("kernel regions not nested: " + b1.to_string() + " within " + b2.to_string());
  }
  return Kernel::scaled_beta(alpha.of(b2.minus(b1)), alpha.of(b2.complement()));
}

Distribution convolve_increments(const Distribution& first, const Distribution& second) {
  Distribution out;
  for (const auto& [y, p] : first) {
    for (const auto& [z, q] : second) add_mass(out, Rational(y + z - y * z), Rational(p * q));
  }
  return out;
}

Distribution shift_increment(const Distribution& increment, const Rational& z1) {
  if (z1 == 1) return point_mass(Rational(1));
  return pushforward(increment, [&](const Rational& v) { return Rational(z1 + (1 - z1) * v); });
}

Kernel compose_kernels(const Kernel& k12, const Kernel& k23) {
  const auto& a = k12.variant();
  const auto& b = k23.variant();
  if (std::holds_alternative<IdentityKernel>(a)) return k23;
  if (std::holds_alternative<IdentityKernel>(b)) return k12;

  auto beta_factors = [](const Kernel::Variant& v) -> std::optional<std::vector<ScaledBeta>> {
    if (const auto* s = std::get_if<ScaledBeta>(&v)) return std::vector<ScaledBeta>{*s};
    if (const auto* c = std::get_if<BetaChain>(&v)) return c->factors;
    return std::nullopt;
  };
  if (auto fa = beta_factors(a)) {
    if (auto fb = beta_factors(b)) {
      fa->insert(fa->end(), fb->begin(), fb->end());
      return Kernel::beta_chain(std::move(*fa));
    }
  }

  const auto* ia = std::get_if<IncrementKernel>(&a);
  const auto* ib = std::get_if<IncrementKernel>(&b);
  if (ia && ib) return Kernel::increment(convolve_increments(ia->increment, ib->increment));

  const auto* ga = std::get_if<GridKernel>(&a);
  if (ga && k23.is_discrete()) {
    const auto* gb = k23.as_grid();
    std::vector<Distribution> composed;
    std::set<Rational> support;
    for (std::size_t i = 0; i < ga->source.size(); ++i) {
      Distribution row;
      for (std::size_t t = 0; t < ga->target.size(); ++t) {
        const Rational& p = ga->rows[i][t];
        if (p == 0) continue;
        if (!k23.defined_at(ga->target[t])) {
          throw ValidationError("support mismatch: first kernel reaches " + to_string(ga->target[t]) +
                                " where the second kernel has no row");
        }
        for (const auto& [z, q] : k23.row(ga->target[t])) add_mass(row, z, Rational(p * q));
      }
      for (const auto& [z, q] : row) support.insert(z);
      composed.push_back(std::move(row));
    }
    std::vector<Rational> target = gb ? gb->target : std::vector<Rational>(support.begin(), support.end());
    std::vector<std::vector<Rational>> rows;
    for (const auto& row : composed) {
      std::vector<Rational> dense(target.size(), Rational(0));
      for (const auto& [z, q] : row) {
        const auto it = std::lower_bound(target.begin(), target.end(), z);
        if (it == target.end() || *it != z) throw InternalConsistencyError("composed mass off target grid");
        dense[static_cast<std::size_t>(it - target.begin())] = q;
      }
      rows.push_back(std::move(dense));
    }
    return Kernel::grid(ga->source, std::move(target), std::move(rows));
  }

  throw ValidationError("cannot compose a " + k12.kind() + " kernel with a " + k23.kind() + " kernel");
}

void compare_kernels(CheckReport& report, const std::string& where, const Kernel& expected,
                     const Kernel& actual, unsigned moment_order) {
  const bool any_grid = expected.as_grid() || actual.as_grid();
  if (expected.is_discrete() && actual.is_discrete() && any_grid) {
    std::set<Rational> sources;
    for (const Kernel* k : {&expected, &actual}) {
      if (const auto* g = k->as_grid()) sources.insert(g->source.begin(), g->source.end());
    }
    for (const auto& z1 : sources) {
      const bool de = expected.defined_at(z1);
      const bool da = actual.defined_at(z1);
      if (!de || !da) {
        report.fail(where + " z1=" + to_string(z1), de ? "row" : "no row", da ? "row" : "no row");
        continue;
      }
      const Distribution re = expected.row(z1);
      const Distribution ra = actual.row(z1);
      std::set<Rational> values;
      for (const auto& [v, p] : re) values.insert(v);
      for (const auto& [v, p] : ra) values.insert(v);
      for (const auto& v : values) {
        const auto ie = re.find(v);
        const auto ia = ra.find(v);
        report.compare(where + " Q(" + to_string(z1) + "; {" + to_string(v) + "})",
                       ie == re.end() ? Rational(0) : ie->second,
                       ia == ra.end() ? Rational(0) : ia->second);
      }
    }
    return;
  }
  if (any_grid) {
    throw ValidationError("cannot compare a " + expected.kind() + " kernel with a " + actual.kind() + " kernel");
  }
  for (unsigned k = 1; k <= moment_order; ++k) {
    report.compare(where + " E[(1-V)^" + std::to_string(k) + "]", expected.one_minus_v_moment(k),
                   actual.one_minus_v_moment(k));
  }
}

void TransitionSystem::set(const RegionSet& b1, const RegionSet& b2, Kernel kernel) {
  if (!b1.subset_of(b2)) {
    throw ValidationError("transition pair not nested: " + b1.to_string() + " within " + b2.to_string());
  }
  family_.insert_or_assign(Pair{b1, b2}, std::move(kernel));
}

bool TransitionSystem::has(const RegionSet& b1, const RegionSet& b2) const {
  return family_.contains(Pair{b1, b2});
}

const Kernel& TransitionSystem::at(const RegionSet& b1, const RegionSet& b2) const {
  const auto it = family_.find(Pair{b1, b2});
  if (it == family_.end()) {
    throw ValidationError("missing kernel for " + b1.to_string() + " -> " + b2.to_string());
  }
  return it->second;
}

std::vector<TransitionSystem::Pair> TransitionSystem::pairs() const {
  std::vector<Pair> out;
  for (const auto& [p, k] : family_) out.push_back(p);
  return out;
}

std::vector<std::array<RegionSet, 3>> TransitionSystem::triples() const {
  std::vector<std::array<RegionSet, 3>> out;
  for (const auto& [p12, k12] : family_) {
    for (const auto& [p23, k23] : family_) {
      if (!(p12.second == p23.first)) continue;
      if (has(p12.first, p23.second)) out.push_back({p12.first, p12.second, p23.second});
    }
  }
  return out;
}

CheckReport check_chapman_kolmogorov(const TransitionSystem& system, const RegionSet& b1,
                                     const RegionSet& b2, const RegionSet& b3, unsigned moment_order) {
  CheckReport report;
  report.check = "chapman-kolmogorov";
  report.add_input("triple", b1.to_string() + " <= " + b2.to_string() + " <= " + b3.to_string());
  const Kernel& k12 = system.at(b1, b2);
  const Kernel& k23 = system.at(b2, b3);
  const Kernel& k13 = system.at(b1, b3);
  report.add_input("kernels", k12.kind() + "," + k23.kind() + "," + k13.kind());
  if (!k13.is_discrete()) report.add_input("moment_order", std::to_string(moment_order));
  compare_kernels(report, b1.to_string() + "->" + b3.to_string(), k13, compose_kernels(k12, k23),
                  moment_order);
  return report;
}

}  // namespace qmrpm
