#include "qmrpm/json_io.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "qmrpm/errors.hpp"

namespace qmrpm::json {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

unsigned positive_int(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) throw ValidationError(std::string(what) + " must be a positive integer");
  return j.get<unsigned>();
}

Json scaled_beta(const ScaledBeta& b) { return Json{{"a", rational(b.a)}, {"b", rational(b.b)}}; }

}  // namespace

Json rational(const Rational& v) { return to_string(v); }

Rational rational(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ValidationError("expected a rational as a \"p/q\" string, got " + j.dump());
}

std::vector<Rational> rationals(const Json& j) {
  if (!j.is_array()) throw ValidationError("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational(v));
  return out;
}

Json region(const RegionSet& r) {
  Json a = Json::array();
  for (const auto& l : r.labels()) a.push_back(l);
  return a;
}

RegionSet region(const SampleSpace& space, const Json& j) {
  if (!j.is_array()) throw ValidationError("a region must be an array of atom labels");
  std::vector<std::string> labels;
  for (const auto& l : j) {
    if (!l.is_string()) throw ValidationError("atom labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  return RegionSet::from_labels(space, labels);
}

Json measure(const Measure& m) {
  Json o = Json::object();
  for (std::size_t a = 0; a < m.space().size(); ++a) o[m.space().label(a)] = rational(m[a]);
  return o;
}

Measure measure(const SampleSpace& space, const Json& j) {
  if (!j.is_object()) throw ValidationError("a measure must be an object of label -> \"p/q\"");
  std::vector<Rational> w(space.size(), Rational(0));
  for (const auto& [label, v] : j.items()) w[space.index_of(label)] = rational(v);
  return Measure(space, std::move(w));
}

Json model(const RpmModel& m) {
  Json o;
  o["model"] = m.kind();
  if (const auto* d = std::get_if<DirichletModel>(&m.variant())) {
    o["alpha"] = measure(d->alpha);
  } else if (const auto* f = std::get_if<EmpiricalFixedModel>(&m.variant())) {
    o["p0"] = measure(f->p0);
    o["N"] = f->N;
  } else if (const auto* e = std::get_if<EmpiricalDirichletModel>(&m.variant())) {
    o["alpha"] = measure(e->alpha);
    o["N"] = e->N;
  }
  return o;
}

RpmModel model(const SampleSpace& space, const Json& j) {
  const std::string kind = field(j, "model").get<std::string>();
  if (kind == "dirichlet") return RpmModel::dirichlet(measure(space, field(j, "alpha")));
  if (kind == "empirical-fixed") {
    return RpmModel::empirical_fixed(measure(space, field(j, "p0")), positive_int(field(j, "N"), "N"));
  }
  if (kind == "empirical-dirichlet") {
    return RpmModel::empirical_dirichlet(measure(space, field(j, "alpha")), positive_int(field(j, "N"), "N"));
  }
  throw ValidationError("unknown model kind '" + kind + "'");
}

Json kernel(const Kernel& k) {
  Json o;
  o["variant"] = k.kind();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GridKernel>) {
          Json src = Json::array(), tgt = Json::array(), rows = Json::object();
          for (const auto& s : v.source) src.push_back(rational(s));
          for (const auto& t : v.target) tgt.push_back(rational(t));
          for (std::size_t i = 0; i < v.source.size(); ++i) {
            Json row = Json::array();
            for (const auto& p : v.rows[i]) row.push_back(rational(p));
            rows[to_string(v.source[i])] = row;
          }
          o["source"] = src;
          o["target"] = tgt;
          o["rows"] = rows;
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          o["a"] = rational(v.a);
          o["b"] = rational(v.b);
        } else if constexpr (std::is_same_v<T, BetaChain>) {
          Json f = Json::array();
          for (const auto& b : v.factors) f.push_back(scaled_beta(b));
          o["factors"] = f;
        } else if constexpr (std::is_same_v<T, IncrementKernel>) {
          const Json law = increment_law(v.increment);
          o["support"] = law["support"];
          o["probs"] = law["probs"];
        }
      },
      k.variant());
  return o;
}

Kernel kernel(const Json& j) {
  const std::string variant = field(j, "variant").get<std::string>();
  if (variant == "identity") return Kernel::identity();
  if (variant == "beta") return Kernel::scaled_beta(rational(field(j, "a")), rational(field(j, "b")));
  if (variant == "beta-chain") {
    std::vector<ScaledBeta> factors;
    for (const auto& f : field(j, "factors")) factors.push_back({rational(field(f, "a")), rational(field(f, "b"))});
    return Kernel::beta_chain(std::move(factors));
  }
  if (variant == "increment") return Kernel::increment(increment_law(j));
  if (variant == "grid") {
    const std::vector<Rational> source = rationals(field(j, "source"));
    const std::vector<Rational> target = rationals(field(j, "target"));
    const Json& rows_json = field(j, "rows");
    if (!rows_json.is_object()) throw ValidationError("grid kernel rows must be an object keyed by source value");
    std::map<Rational, std::vector<Rational>> by_source;
    for (const auto& [key, row] : rows_json.items()) by_source[parse_rational(key)] = rationals(row);
    std::vector<std::vector<Rational>> rows;
    for (const auto& s : source) {
      const auto it = by_source.find(s);
      if (it == by_source.end()) throw ValidationError("grid kernel has no row for source " + to_string(s));
      rows.push_back(it->second);
    }
    if (by_source.size() != source.size()) throw ValidationError("grid kernel has rows off its source support");
    return Kernel::grid(source, target, std::move(rows));
  }
  throw ValidationError("unknown kernel variant '" + variant + "'");
}

Json increment_law(const IncrementLaw& f) {
  Json support = Json::array(), probs = Json::array();
  for (const auto& [v, p] : f) {
    support.push_back(rational(v));
    probs.push_back(rational(p));
  }
  return Json{{"support", support}, {"probs", probs}};
}

IncrementLaw increment_law(const Json& j) {
  const auto support = rationals(field(j, "support"));
  const auto probs = rationals(field(j, "probs"));
  if (support.size() != probs.size()) throw ValidationError("support and probs differ in length");
  IncrementLaw law;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (law.contains(support[i])) throw ValidationError("repeated support value " + to_string(support[i]));
    if (probs[i] < 0) throw ValidationError("negative probability");
    add_mass(law, support[i], probs[i]);
  }
  require_increment_law(law);
  return law;
}

Json f_system(const FSystem& fs) {
  Json a = Json::array();
  for (const auto& [b1, b2] : fs.pairs()) {
    Json e = increment_law(fs.at(b1, b2));
    Json o;
    o["pair"] = Json::array({region(b1), region(b2)});
    o["support"] = e["support"];
    o["probs"] = e["probs"];
    a.push_back(o);
  }
  return a;
}

FSystem f_system(const SampleSpace& space, const Json& j) {
  if (!j.is_array()) throw ValidationError("an F-system must be an array of pair entries");
  FSystem fs;
  for (const auto& e : j) {
    const Json& pair = field(e, "pair");
    if (!pair.is_array() || pair.size() != 2) throw ValidationError("an F-system pair needs two regions");
    fs.set(region(space, pair[0]), region(space, pair[1]), increment_law(e));
  }
  return fs;
}

Json chain_spec(const ChainSpec& c) {
  Json grid = Json::array();
  for (const auto& g : c.grid) grid.push_back(rational(g));
  Json initial = Json::object();
  for (const auto& [y, p] : c.initial) initial[to_string(y)] = rational(p);
  Json kernels = Json::array();
  for (const auto& k : c.kernels) {
    Json rows = Json::object();
    const auto* g = k.as_grid();
    if (!g) throw ValidationError("chain kernels must be grid kernels");
    for (std::size_t i = 0; i < g->source.size(); ++i) {
      Json row = Json::object();
      for (std::size_t t = 0; t < g->target.size(); ++t) {
        if (g->rows[i][t] != 0) row[to_string(g->target[t])] = rational(g->rows[i][t]);
      }
      rows[to_string(g->source[i])] = row;
    }
    kernels.push_back(rows);
  }
  return Json{{"grid", grid}, {"initial", initial}, {"kernels", kernels}};
}

ChainSpec chain_spec(const Json& j) {
  ChainSpec c;
  c.grid = rationals(field(j, "grid"));
  std::set<Rational> grid(c.grid.begin(), c.grid.end());
  for (const auto& [y, p] : field(j, "initial").items()) add_mass(c.initial, parse_rational(y), rational(p));
  const Json& kernels = field(j, "kernels");
  if (!kernels.is_array()) throw ValidationError("chain kernels must be an array of row maps");
  for (const auto& rows_json : kernels) {
    if (!rows_json.is_object()) throw ValidationError("a chain kernel must be an object of rows");
    std::vector<Rational> source;
    std::vector<std::vector<Rational>> rows;
    std::map<Rational, Json> ordered;
    for (const auto& [y, row] : rows_json.items()) ordered.emplace(parse_rational(y), row);
    for (const auto& [y, row] : ordered) {
      std::vector<Rational> dense(c.grid.size(), Rational(0));
      for (const auto& [z, p] : row.items()) {
        const Rational zv = parse_rational(z);
        const auto it = std::lower_bound(c.grid.begin(), c.grid.end(), zv);
        if (it == c.grid.end() || *it != zv) throw ValidationError("chain kernel target " + z + " is off the grid");
        dense[static_cast<std::size_t>(it - c.grid.begin())] = rational(p);
      }
      source.push_back(y);
      rows.push_back(std::move(dense));
    }
    c.kernels.push_back(Kernel::grid(std::move(source), c.grid, std::move(rows)));
  }
  validate_chain(c);
  return c;
}

Json neutral_vector(const NeutralVector& nv) {
  Json a = Json::array();
  for (const auto& f : nv.laws) a.push_back(increment_law(f));
  return a;
}

NeutralVector neutral_vector(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("a neutral vector must be a nonempty array of laws");
  NeutralVector nv;
  for (const auto& f : j) nv.laws.push_back(increment_law(f));
  return nv;
}

NtrChainPrior ntr_prior(const Json& j) {
  NtrChainPrior p;
  for (const auto& f : field(j, "increments")) p.increments.push_back(increment_law(f));
  validate_ntr_prior(p);
  return p;
}

Json report(const CheckReport& r, bool with_timing) {
  Json o;
  o["check"] = r.check;
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  o["inputs"] = inputs;
  o["pass"] = r.pass;
  o["max_discrepancy"] = rational(r.max_discrepancy);
  if (r.max_abs_z) o["max_abs_z"] = *r.max_abs_z;
  o["comparisons"] = r.comparisons;
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back(Json{{"where", w.where}, {"expected", w.expected}, {"actual", w.actual}});
  }
  o["witnesses"] = witnesses;
  if (with_timing) o["wall_time_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
  return o;
}

}  // namespace qmrpm::json
