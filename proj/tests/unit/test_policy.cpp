#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "poscomp/errors.hpp"
#include "poscomp/policy.hpp"

using namespace poscomp;

namespace {

std::vector<FamilyParams> families(const std::vector<double>& gammas, double p = 0.5) {
  std::vector<FamilyParams> out;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    out.push_back({"f" + std::to_string(i), gammas[i], p, Rationality::Bounded});
  return out;
}

PopulationSpec dispersed(std::uint64_t seed, int n = 100) {
  PopulationSpec s;
  s.n = n;
  s.gamma_dist = NormalDist{3.0, 1.0, 0.5};
  s.seed = seed;
  return s;
}

SimConfig short_sim(double k = 1.645, int rounds = 10) {
  SimConfig c;
  c.threshold = ThresholdSpec::mean_plus_k_sigma(k);
  c.rounds_max = rounds;
  return c;
}

PolicyReport report(std::string name, double welfare, double share) {
  PolicyReport r;
  r.name = std::move(name);
  r.welfare_mean_competitors = welfare;
  r.equity.participation_share = share;
  return r;
}

}  // namespace

TEST(CeeBaseline, FullParticipation) {
  const auto r = run_cee_baseline(dispersed(1), short_sim());
  EXPECT_EQ(r.equity.participation_share, 1.0);
  EXPECT_EQ(r.kind, "cee");
  EXPECT_NO_THROW(r.check_invariants());
}

TEST(CeeBaseline, DispersionRaisesThreshold) {
  SimConfig c = short_sim(1.645, 20);
  c.t_hard_cap = 1e6;
  const auto low = run_cee_baseline(families({4.8, 5.0, 5.2}, 2.0), c);
  const auto high = run_cee_baseline(families({4.0, 5.0, 6.0}, 2.0), c);
  EXPECT_GT(high.s_cut_final, low.s_cut_final);
}

TEST(CeeBaseline, SingleFamilyThresholdIsOwnScore) {
  const auto fs = families({3.0});
  const auto tr = simulate_feedback(fs, short_sim(0.0, 5));
  for (const auto& r : tr.rounds) EXPECT_EQ(r.s_cut, r.scores[0]);
}

TEST(Diversion, FullKeepMatchesBaselineBitForBit) {
  const auto pop = dispersed(7);
  const auto base = run_cee_baseline(pop, short_sim());
  const auto div = run_diversion(pop, short_sim(), Diversion{1.0, 123.0, false});
  EXPECT_EQ(base.welfare_total, div.welfare_total);
  EXPECT_EQ(base.s_cut_final, div.s_cut_final);
  EXPECT_EQ(base.mean_effort, div.mean_effort);
  EXPECT_EQ(base.equity.utility_gini, div.equity.utility_gini);
  EXPECT_EQ(div.equity.excluded_utility_gap, 0.0);
}

TEST(Diversion, ShareIsExact) {
  const auto pop = dispersed(3, 40);
  for (double f : {0.25, 0.5, 0.75, 1.0}) {
    const auto r = run_diversion(pop, short_sim(), Diversion{f, 0.0, false});
    EXPECT_EQ(r.equity.participation_share, f);
  }
}

TEST(Diversion, KeepsHighestAptitude) {
  const auto fs = families({1, 5, 2, 4, 3, 6});
  const auto idx = diversion_pool(fs, short_sim(), Diversion{0.5, 0, false});
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 3, 5}));
}

TEST(Diversion, ExcludedGapUsesSubsidy) {
  const auto fs = families({1, 5, 2, 4, 3, 6});
  const auto r = run_diversion(fs, short_sim(), Diversion{0.5, 0.2, false});
  EXPECT_NEAR(r.equity.excluded_utility_gap, r.welfare_mean_competitors - 0.2, 1e-15);
  EXPECT_NEAR(r.welfare_total, 3 * r.welfare_mean_competitors + 3 * 0.2, 1e-12);
}

TEST(Diversion, DegeneratePool) {
  const auto fs = families({1, 5, 2, 4});
  EXPECT_THROW(run_diversion(fs, short_sim(), Diversion{0.25, 0, false}), DegeneratePool);
  EXPECT_THROW(run_diversion(fs, short_sim(), Diversion{0.0, 0, false}), InvalidArgument);
}

TEST(Diversion, TruncationReducesDispersion) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto pop = dispersed(seed, 200);
    const auto fs = sample_population(pop);
    const auto idx = diversion_pool(fs, short_sim(), Diversion{0.5, 0, false});
    std::vector<double> all, kept;
    for (const auto& f : fs) all.push_back(f.gamma / f.p);
    for (auto i : idx) kept.push_back(fs[i].gamma / fs[i].p);
    EXPECT_LT(oracle::naive_pstdev(kept), oracle::naive_pstdev(all)) << "seed " << seed;
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(Diversion, LowerIncrementThanBaseline) {
  SimConfig c = short_sim(1.645, 5);
  c.t_hard_cap = 1e6;
  const auto pop = dispersed(5);
  const auto fs = sample_population(pop);
  const auto idx = diversion_pool(fs, c, Diversion{0.5, 0, false});
  std::vector<FamilyParams> kept;
  for (auto i : idx) kept.push_back(fs[i]);
  const auto full = simulate_feedback(fs, c);
  const auto pool = simulate_feedback(kept, c);
  EXPECT_LT(pool.rounds[3].sigma_s, full.rounds[3].sigma_s);
}

TEST(Diversion, RankAfterFirstRound) {
  const auto fs = families({1, 5, 2, 4, 3, 6});
  const auto idx = diversion_pool(fs, short_sim(), Diversion{0.5, 0, true});
  EXPECT_EQ(idx, (std::vector<std::size_t>{1, 3, 5}));
}

TEST(BetaReduction, CalibratedCosts) {
  const std::vector<FamilyParams> fs{{"f1", 2.0, 0.5, Rationality::Bounded},
                                     {"f2", 3.75, 0.5, Rationality::Bounded}};
  BetaReduction b;
  b.wages.beta = 10;
  b.beta_target = 1;
  const auto [before, after] = run_beta_reduction(fs, b);
  EXPECT_EQ(before.equity.participation_share, 1.0);
  EXPECT_EQ(after.equity.participation_share, 0.5);
  EXPECT_EQ(before.welfare_mean, 850.0);
  EXPECT_EQ(after.welfare_mean, 1100.0);
  EXPECT_EQ(after.units, "money");
  EXPECT_LT(after.sigma_s_final, before.sigma_s_final);
}

TEST(BetaReduction, SameBetaIdentical) {
  BetaReduction b;
  b.wages.beta = 4;
  b.beta_target = 4;
  const auto [before, after] = run_beta_reduction(dispersed(2), b);
  EXPECT_EQ(before.welfare_total, after.welfare_total);
  EXPECT_EQ(before.equity.participation_share, after.equity.participation_share);
  EXPECT_EQ(before.sigma_s_final, after.sigma_s_final);
}

TEST(BetaReduction, LowerBetaNeverRaisesParticipation) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> beta(0.1, 30);
  for (int i = 0; i < 50; ++i) {
    double hi = beta(rng), lo = beta(rng);
    if (lo > hi) std::swap(lo, hi);
    BetaReduction b;
    b.wages.beta = hi;
    b.beta_target = lo;
    const auto [before, after] = run_beta_reduction(dispersed(static_cast<std::uint64_t>(i)), b);
    EXPECT_LE(after.equity.participation_share, before.equity.participation_share);
  }
}

TEST(ExamRedesign, UnitWeightMatchesBaseline) {
  const auto pop = dispersed(9);
  const auto base = run_cee_baseline(pop, short_sim());
  const auto r = run_exam_redesign(pop, short_sim(), 1.0);
  EXPECT_EQ(r.welfare_total, base.welfare_total);
  EXPECT_EQ(r.mean_effort, base.mean_effort);
  EXPECT_EQ(*r.mean_effort_reduction, 0.0);
}

TEST(ExamRedesign, SquaredAptitude) {
  const auto fs = families({1.5, 1.5, 1.5, 1.5});
  SimConfig c = short_sim(0.0, 3);
  c.t_hard_cap = 1e6;
  const auto weighted = emphasize_aptitude(fs, 2.0);
  const auto tr = simulate_feedback(weighted, c);
  for (std::size_t r = 1; r < tr.rounds.size(); ++r)
    EXPECT_NEAR(tr.rounds[r].s_cut - tr.rounds[r - 1].s_cut, 2.25 / 0.5 - 2, 1e-9);
  const FamilyParams hi{"h", 3.0, 0.5, Rationality::Bounded};
  EXPECT_LT(best_response_population(emphasize_aptitude(std::vector{hi}, 2.0)[0], 10),
            best_response_population(hi, 10));
  EXPECT_THROW(emphasize_aptitude(fs, 0.5), InvalidArgument);
}

TEST(ExamRedesign, ReportWellFormed) {
  const auto r = run_exam_redesign(dispersed(4, 100), short_sim(), 1.5);
  EXPECT_EQ(r.kind, "exam_redesign");
  ASSERT_TRUE(r.baseline_mean_effort.has_value());
  EXPECT_NEAR(*r.mean_effort_reduction, *r.baseline_mean_effort - r.mean_effort, 1e-15);
  EXPECT_NO_THROW(r.check_invariants());
}

TEST(RunScenario, NamesAndKinds) {
  PolicyScenario s{"cut", BetaReduction{}, dispersed(1, 10), short_sim()};
  const auto rs = run_scenario(s);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].name, "cut@before");
  EXPECT_EQ(rs[1].name, "cut@after");
  EXPECT_EQ(rs[0].kind, "beta_reduction");
  PolicyScenario d{"half", Diversion{}, dispersed(1, 10), short_sim()};
  EXPECT_EQ(run_scenario(d).front().name, "half");
  d.kind = Diversion{1.5, 0, false};
  EXPECT_THROW(run_scenario(d), InvalidArgument);
}

TEST(ComparePolicies, CeeVersusDiversionDilemma) {
  const auto pop = dispersed(21);
  std::vector<PolicyReport> rs;
  rs.push_back(run_scenario({"cee", CeeBaseline{}, pop, short_sim()}).front());
  rs.push_back(run_scenario({"diversion", Diversion{}, pop, short_sim()}).front());
  EXPECT_GT(rs[1].welfare_mean_competitors, rs[0].welfare_mean_competitors);
  EXPECT_LT(rs[1].equity.participation_share, rs[0].equity.participation_share);
  const auto t = compare_policies(rs);
  ASSERT_EQ(t.comparisons.size(), 1u);
  EXPECT_TRUE(t.comparisons[0].dilemma);
  EXPECT_EQ(t.comparisons[0].welfare_leader, "diversion");
}

TEST(ComparePolicies, IdenticalReportsNoDominance) {
  const std::vector<PolicyReport> rs{report("a", 1, 1), report("b", 1, 1)};
  const auto c = compare_policies(rs).comparisons.at(0);
  EXPECT_FALSE(c.a_dominates);
  EXPECT_FALSE(c.b_dominates);
  EXPECT_FALSE(c.dilemma);
}

TEST(ComparePolicies, SingleMetricDirection) {
  const std::vector<PolicyReport> rs{report("a", 1, 0.5), report("b", 2, 0.5)};
  const auto c = compare_policies(rs).comparisons.at(0);
  EXPECT_FALSE(c.a_dominates);
  EXPECT_TRUE(c.b_dominates);
  EXPECT_FALSE(c.dilemma);
}

TEST(ComparePolicies, OrderInvariant) {
  std::vector<PolicyReport> rs{report("c", 3, 0.2), report("a", 1, 0.9), report("b", 2, 0.5),
                               report("d", 2, 0.9)};
  const auto ref = compare_policies(rs);
  std::sort(rs.begin(), rs.end(), [](auto& x, auto& y) { return x.name > y.name; });
  do {
    const auto t = compare_policies(rs);
    ASSERT_EQ(t.comparisons.size(), ref.comparisons.size());
    for (std::size_t i = 0; i < t.comparisons.size(); ++i) {
      EXPECT_EQ(t.comparisons[i].a, ref.comparisons[i].a);
      EXPECT_EQ(t.comparisons[i].b, ref.comparisons[i].b);
      EXPECT_EQ(t.comparisons[i].a_dominates, ref.comparisons[i].a_dominates);
      EXPECT_EQ(t.comparisons[i].dilemma, ref.comparisons[i].dilemma);
    }
  } while (std::prev_permutation(rs.begin(), rs.end(),
                                 [](auto& x, auto& y) { return x.name < y.name; }));
}

TEST(ComparePolicies, SkipsMixedUnitsAndNeedsTwo) {
  auto money = report("m", 1000, 1);
  money.units = "money";
  const std::vector<PolicyReport> rs{report("a", 1, 1), money};
  EXPECT_TRUE(compare_policies(rs).comparisons.empty());
  EXPECT_THROW(compare_policies(std::vector<PolicyReport>{report("a", 1, 1)}), InvalidArgument);
}
