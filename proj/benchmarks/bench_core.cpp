#include <benchmark/benchmark.h>

#include "qmrpm/chain_bayes.hpp"
#include "qmrpm/ntr.hpp"
#include "qmrpm/posterior.hpp"

using namespace qmrpm;

namespace {

SampleSpace space(std::size_t atoms) {
  std::vector<std::string> labels;
  for (std::size_t a = 1; a <= atoms; ++a) labels.push_back(std::to_string(a));
  return build_space(labels);
}

std::vector<RegionSet> prefix(const SampleSpace& X) {
  std::vector<RegionSet> out{RegionSet::empty(X)};
  for (std::size_t k = 1; k <= X.size(); ++k) out.emplace_back(X, (std::uint64_t{1} << k) - 1);
  return out;
}

void BM_EnumerateJoint(benchmark::State& state) {
  const auto X = space(static_cast<std::size_t>(state.range(0)));
  const auto m = RpmModel::empirical_dirichlet(Measure::uniform(X, make_rational(1, 1)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_joint(m, 2).entries().size());
}
BENCHMARK(BM_EnumerateJoint)->Arg(3)->Arg(4)->Arg(5);

void BM_ChapmanKolmogorov(benchmark::State& state) {
  const auto X = space(4);
  const auto regions = prefix(X);
  const auto m = RpmModel::empirical_fixed(Measure::uniform(X, make_rational(1, 4)), static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    const TransitionSystem ts = build_transition_system(m, regions);
    for (const auto& t : ts.triples()) benchmark::DoNotOptimize(check_chapman_kolmogorov(ts, t[0], t[1], t[2]).pass);
  }
}
BENCHMARK(BM_ChapmanKolmogorov)->Arg(2)->Arg(4)->Arg(6);

void BM_PosteriorMarkov(benchmark::State& state) {
  const auto X = space(3);
  const auto regions = prefix(X);
  const auto m = RpmModel::empirical_dirichlet(Measure::uniform(X, make_rational(1, 1)), 3);
  const JointTable table = enumerate_joint(m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(verify_posterior_markov(m, table, regions, {1, 2}).pass);
}
BENCHMARK(BM_PosteriorMarkov);

void BM_SamplePaths(benchmark::State& state) {
  const auto X = space(3);
  const auto m = RpmModel::empirical_fixed(Measure::uniform(X, make_rational(1, 3)), 2);
  const auto regions = prefix(X);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_paths(m, 1, 7, static_cast<std::uint64_t>(state.range(0)), regions).reps);
  }
}
BENCHMARK(BM_SamplePaths)->Arg(10000)->Arg(100000);

void BM_NeutralUpdate(benchmark::State& state) {
  NeutralVector nv;
  for (int j = 0; j < state.range(0); ++j) {
    Distribution law;
    add_mass(law, make_rational(1, 4), make_rational(1, 2));
    add_mass(law, make_rational(1, 2), make_rational(1, 2));
    nv.laws.push_back(law);
  }
  for (auto _ : state) benchmark::DoNotOptimize(verify_neutral_update(nv, 2).pass);
}
BENCHMARK(BM_NeutralUpdate)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
