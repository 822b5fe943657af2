#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "qmrpm/errors.hpp"

namespace qmrpm::cli {

namespace {

using json::Json;

const std::set<std::string> kTopLevel = {
    "space",        "collection",   "models",          "chains",    "observations", "max_observations",
    "transition_systems", "f_systems", "ntr_priors",   "chain_specs", "neutral_vectors", "checks",
    "seed",         "moment_order", "budget",          "jobs",      "monte_carlo",  "out"};

std::uint64_t unsigned_field(const Json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ValidationError("'" + key + "' must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

template <class T, class F>
std::vector<Named<T>> named_entries(const Json& doc, const char* key, F&& parse) {
  std::vector<Named<T>> out;
  if (!doc.contains(key)) return out;
  const Json& obj = doc.at(key);
  if (!obj.is_object()) throw ValidationError(std::string("'") + key + "' must be an object keyed by name");
  for (const auto& [name, value] : obj.items()) {
    try {
      out.push_back({name, parse(value)});
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(key) + "." + name + ": " + e.what());
    }
  }
  return out;
}

ObservationVector observation(const SampleSpace& space, const Json& j) {
  if (!j.is_array()) throw ValidationError("an observation vector must be an array of atom labels");
  ObservationVector x;
  for (const auto& l : j) {
    if (!l.is_string()) throw ValidationError("atom labels must be strings");
    x.push_back(space.index_of(l.get<std::string>()));
  }
  return x;
}

}  // namespace

RunConfig::RunConfig(SampleSpace s, IndexingCollection c)
    : space(std::move(s)), collection(std::move(c)), regions(union_closure(collection)) {}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "ck",           "c1c3",        "posterior-markov", "central-bayes",     "shift-n1",   "dirichlet-posterior",
      "ntr-system",   "ntr-posterior", "outside-formulas", "chain-bayes",     "sample"};
  return names;
}

std::vector<ObservationVector> observation_set(const RunConfig& config) {
  if (!config.observations.empty()) return config.observations;
  std::vector<ObservationVector> out;
  for (std::size_t n = 0; n <= config.max_observations; ++n) {
    for (auto& x : all_observations(config.space, n)) out.push_back(std::move(x));
  }
  return out;
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ValidationError("the config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevel.contains(key)) throw ValidationError("unknown config field '" + key + "'");
  }
  if (!doc.contains("space")) throw ValidationError("missing field 'space'");
  const Json& space_json = doc.at("space");
  if (!space_json.is_array()) throw ValidationError("'space' must be an array of atom labels");
  std::vector<std::string> labels;
  for (const auto& l : space_json) {
    if (!l.is_string()) throw ValidationError("atom labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  SampleSpace space = build_space(std::move(labels));

  std::vector<RegionSet> members;
  if (doc.contains("collection")) {
    if (!doc.at("collection").is_array()) throw ValidationError("'collection' must be an array of regions");
    for (const auto& r : doc.at("collection")) members.push_back(json::region(space, r));
  }
  RunConfig config(space, build_indexing_collection(space, std::move(members)));

  config.models = named_entries<RpmModel>(doc, "models", [&](const Json& j) { return json::model(space, j); });
  config.transition_systems = named_entries<TransitionSystem>(doc, "transition_systems", [&](const Json& j) {
    if (!j.is_array()) throw ValidationError("a transition system must be an array of {pair, kernel}");
    TransitionSystem ts;
    for (const auto& e : j) {
      if (!e.contains("pair") || !e.contains("kernel")) throw ValidationError("entries need 'pair' and 'kernel'");
      const Json& pair = e.at("pair");
      if (!pair.is_array() || pair.size() != 2) throw ValidationError("a pair needs two regions");
      ts.set(json::region(space, pair[0]), json::region(space, pair[1]), json::kernel(e.at("kernel")));
    }
    return ts;
  });
  config.f_systems = named_entries<FSystem>(doc, "f_systems", [&](const Json& j) { return json::f_system(space, j); });
  config.ntr_priors = named_entries<NtrChainPrior>(doc, "ntr_priors", [](const Json& j) { return json::ntr_prior(j); });
  config.chain_specs = named_entries<ChainSpec>(doc, "chain_specs", [](const Json& j) { return json::chain_spec(j); });
  config.neutral_vectors =
      named_entries<NeutralVector>(doc, "neutral_vectors", [](const Json& j) { return json::neutral_vector(j); });

  if (doc.contains("chains")) {
    const std::set<RegionSet> known(config.regions.begin(), config.regions.end());
    for (const auto& c : doc.at("chains")) {
      std::vector<RegionSet> chain;
      for (const auto& r : c) {
        RegionSet b = json::region(space, r);
        if (!known.contains(b)) throw ValidationError("chain set " + b.to_string() + " is not a finite union of collection sets");
        chain.push_back(b);
      }
      partition_chain(chain);
      config.chains.push_back(std::move(chain));
    }
  } else {
    std::vector<RegionSet> nonempty;
    for (const auto& r : config.regions) {
      if (!r.is_empty()) nonempty.push_back(r);
    }
    for (std::size_t len = 2; len <= 3; ++len) {
      for (auto& c : nested_chains(nonempty, len, true)) config.chains.push_back(std::move(c));
    }
  }

  if (doc.contains("observations")) {
    for (const auto& x : doc.at("observations")) config.observations.push_back(observation(space, x));
  }
  if (doc.contains("max_observations")) config.max_observations = unsigned_field(doc.at("max_observations"), "max_observations");
  if (doc.contains("checks")) {
    for (const auto& c : doc.at("checks")) {
      const std::string name = c.get<std::string>();
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) throw ValidationError("unknown check '" + name + "'");
      config.checks.push_back(name);
    }
  }
  if (doc.contains("seed")) config.seed = unsigned_field(doc.at("seed"), "seed");
  if (doc.contains("moment_order")) config.moment_order = static_cast<unsigned>(unsigned_field(doc.at("moment_order"), "moment_order"));
  if (doc.contains("budget")) config.budget = unsigned_field(doc.at("budget"), "budget");
  if (doc.contains("jobs")) config.jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, unsigned_field(doc.at("jobs"), "jobs")));
  if (doc.contains("monte_carlo")) {
    const Json& mc = doc.at("monte_carlo");
    if (mc.contains("reps")) config.mc_reps = unsigned_field(mc.at("reps"), "monte_carlo.reps");
    if (mc.contains("n")) config.mc_n = unsigned_field(mc.at("n"), "monte_carlo.n");
  }
  if (doc.contains("out")) config.out = doc.at("out").get<std::string>();
  if (config.moment_order == 0) throw ValidationError("'moment_order' must be positive");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
}

}  // namespace qmrpm::cli
