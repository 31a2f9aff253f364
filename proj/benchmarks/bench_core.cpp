#include <benchmark/benchmark.h>

#include "poscomp/equilibrium.hpp"
#include "poscomp/policy.hpp"
#include "poscomp/population.hpp"
#include "poscomp/signaling.hpp"

using namespace poscomp;

namespace {

TwoFamilySetup reference_setup() {
  return TwoFamilySetup{{"f1", 5.0, 0.5, Rationality::Bounded},
                        {"f2", 4.0, 0.5, Rationality::Bounded},
                        2.0,
                        kDefaultHardCap};
}

PopulationSpec population(int n) {
  PopulationSpec s;
  s.n = n;
  s.gamma_dist = UniformDist{4.0, 6.0};
  s.p_dist = ExplicitDist{{2.0}};
  s.seed = 1;
  return s;
}

void BM_BuildGame(benchmark::State& state) {
  const auto s = reference_setup();
  for (auto _ : state) benchmark::DoNotOptimize(build_obey_disobey_game(s));
}
BENCHMARK(BM_BuildGame);

void BM_AnalyzeDominance(benchmark::State& state) {
  const auto g = build_obey_disobey_game(reference_setup());
  for (auto _ : state) benchmark::DoNotOptimize(analyze_dominance(g));
}
BENCHMARK(BM_AnalyzeDominance);

void BM_NumericOracle(benchmark::State& state) {
  const FamilyParams f{"f", 3.0, 0.5, Rationality::Bounded};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        best_response_numeric_oracle([&](double t) { return committed_utility(f, t, 3.0); }));
  }
}
BENCHMARK(BM_NumericOracle);

void BM_SimulateFeedback(benchmark::State& state) {
  const auto families = sample_population(population(static_cast<int>(state.range(0))));
  SimConfig cfg;
  cfg.threshold = ThresholdSpec::mean_plus_k_sigma(1.645);
  cfg.rounds_max = static_cast<int>(state.range(1));
  cfg.t_hard_cap = 1e6;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_feedback(families, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_SimulateFeedback)->Args({100, 50})->Args({1000, 50})->Args({10000, 50});

void BM_BetaSensitivity(benchmark::State& state) {
  const auto families = sample_population(population(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        beta_sensitivity(families, WageModel{}, 12.0, 250.0, default_beta_grid()));
  }
}
BENCHMARK(BM_BetaSensitivity)->Arg(1000);

void BM_Diversion(benchmark::State& state) {
  const auto families = sample_population(population(static_cast<int>(state.range(0))));
  SimConfig cfg;
  cfg.rounds_max = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_diversion(families, cfg, Diversion{}));
}
BENCHMARK(BM_Diversion)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
