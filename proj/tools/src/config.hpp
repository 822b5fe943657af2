#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qmrpm/chain_bayes.hpp"
#include "qmrpm/json_io.hpp"
#include "qmrpm/kernels.hpp"
#include "qmrpm/models.hpp"
#include "qmrpm/ntr.hpp"
#include "qmrpm/posterior.hpp"
#include "qmrpm/regions.hpp"

namespace qmrpm::cli {

template <class T>
struct Named {
  std::string name;
  T value;
};

/// Everything a run needs, resolved against the declared space.
struct RunConfig {
  RunConfig(SampleSpace s, IndexingCollection c);

  SampleSpace space;
  IndexingCollection collection;
  /// Union closure of the collection.
  std::vector<RegionSet> regions;

  std::vector<Named<RpmModel>> models;
  std::vector<std::vector<RegionSet>> chains;
  std::vector<ObservationVector> observations;
  std::size_t max_observations = 1;

  std::vector<Named<TransitionSystem>> transition_systems;
  std::vector<Named<FSystem>> f_systems;
  std::vector<Named<NtrChainPrior>> ntr_priors;
  std::vector<Named<ChainSpec>> chain_specs;
  std::vector<Named<NeutralVector>> neutral_vectors;

  /// Suites run by `all`; empty means every suite.
  std::vector<std::string> checks;

  std::uint64_t seed = 0;
  unsigned moment_order = 4;
  std::uint64_t budget = kDefaultBudget;
  unsigned jobs = 1;
  std::uint64_t mc_reps = 100'000;
  std::size_t mc_n = 1;
  std::string out = "qmrpm-report.json";
};

/// Observation vectors for the observation-indexed suites: the declared list when
/// present, otherwise every vector of length 0..max_observations.
std::vector<ObservationVector> observation_set(const RunConfig& config);

/// ValidationError on any malformed or unresolved entry.
RunConfig parse_config(const json::Json& document);
/// Adds an Error with the path for unreadable files.
RunConfig load_config(const std::filesystem::path& path);

/// Suite names accepted by `verify` and by the config's "checks" list, in run order.
const std::vector<std::string>& suite_names();

}  // namespace qmrpm::cli
