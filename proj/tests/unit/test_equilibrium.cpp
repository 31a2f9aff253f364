#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "poscomp/equilibrium.hpp"
#include "poscomp/errors.hpp"

using namespace poscomp;

namespace {

FamilyParams fam(double gamma, double p, const char* id = "f") {
  return FamilyParams{id, gamma, p, Rationality::Bounded};
}

TwoFamilySetup setup(double g1, double g2, double p = 0.5, double t_obey = 2.0) {
  return TwoFamilySetup{fam(g1, p, "f1"), fam(g2, p, "f2"), t_obey, kDefaultHardCap};
}

const FiniteCell& finite(const ObeyDisobeyGame& g, Action a1, Action a2) {
  return std::get<FiniteCell>(g.at(a1, a2));
}

constexpr auto O = Action::Obey;
constexpr auto D = Action::Disobey;

}  // namespace

TEST(MarginalUtility, SubstitutionExample) {
  EXPECT_NEAR(marginal_utility_two_family(fam(5, 0.5), fam(4, 0.5), 2, 2), 2.5 / 3.0 - 0.5, 1e-15);
  EXPECT_NEAR(marginal_utility_two_family(fam(5, 0.5), fam(4, 0.5), 2, 2), 0.3333, 5e-5);
}

TEST(MarginalUtility, ZeroAtBestResponse) {
  for (double tj : {0.0, 1.0, 2.5, 4.0}) {
    const double ti = best_response_two_family(fam(5, 0.5), 4, tj);
    ASSERT_GT(ti, 0.0);
    EXPECT_NEAR(marginal_utility_two_family(fam(5, 0.5), fam(4, 0.5), ti, tj), 0.0, 1e-12);
  }
}

TEST(MarginalUtility, MatchesFiniteDifference) {
  const auto fi = fam(5, 0.5), fj = fam(4, 0.5);
  auto u = [&](double ti) {
    const double cut = two_family_threshold(5, ti, 4, 1.0);
    return std::log(2.0 + 5 * ti - cut) - 0.5 * ti;
  };
  for (double ti : {0.5, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(marginal_utility_two_family(fi, fj, ti, 1.0), oracle::central_difference(u, ti), 1e-7);
    EXPECT_NEAR(curvature_two_family(fi, fj, ti, 1.0), oracle::second_difference(u, ti), 1e-4);
    EXPECT_LT(curvature_two_family(fi, fj, ti, 1.0), 0.0);
  }
}

TEST(MarginalUtility, DomainError) {
  // x = 2 + (1*0 - 4*5)/2 < 0
  EXPECT_THROW(marginal_utility_two_family(fam(1, 0.5), fam(4, 0.5), 0, 5), DomainError);
  EXPECT_THROW(curvature_two_family(fam(1, 0.5), fam(4, 0.5), 0, 5), DomainError);
}

TEST(MarginalUtility, StrictlyDecreasingOnDomain) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(1, 10), p(0.1, 2), t(0, 10);
  for (int i = 0; i < 300; ++i) {
    const auto fi = fam(g(rng), p(rng)), fj = fam(g(rng), p(rng));
    const double tj = t(rng);
    double prev = INFINITY;
    for (double ti = 0; ti <= 24; ti += 0.25) {
      const double x = 2 + (fi.gamma * ti - fj.gamma * tj) / 2;
      if (x <= 0) continue;
      const double m = marginal_utility_two_family(fi, fj, ti, tj);
      EXPECT_LT(m, prev);
      prev = m;
    }
  }
}

TEST(BestResponseTwoFamily, Examples) {
  EXPECT_DOUBLE_EQ(best_response_two_family(fam(4, 0.5), 5, 2), 3.5);
  EXPECT_NEAR(best_response_two_family(fam(5, 0.5), 4, 2), 2.8, 1e-15);
  EXPECT_DOUBLE_EQ(best_response_two_family(fam(4, 0.25), 4, 0), 3.0);
}

TEST(BestResponseTwoFamily, ClampsToRange) {
  EXPECT_EQ(best_response_two_family(fam(1, 2), 1, 0), 0.0);
  EXPECT_EQ(best_response_two_family(fam(1, 0.5), 10, 10), kDefaultHardCap);
  EXPECT_EQ(best_response_two_family(fam(1, 0.5), 10, 3, 50.0), 28.0);
}

TEST(BestResponseTwoFamily, AgreesWithDenseGridOnExample) {
  const auto f = fam(4, 0.25);
  auto u = [&](double t) { return committed_utility(f, t, two_family_threshold(4, t, 4, 0)); };
  EXPECT_NEAR(oracle::dense_argmax(u, 0, 24, 240000), 3.0, 1e-4);
}

TEST(BestResponseTwoFamily, InteriorLogArgumentIsGammaOverTwoP) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> g(1, 10), p(0.1, 2), t(0, 10);
  for (int i = 0; i < 1000; ++i) {
    const auto fi = fam(g(rng), p(rng));
    const double gj = g(rng), tj = t(rng);
    const double ti = best_response_two_family(fi, gj, tj);
    if (ti <= 0 || ti >= kDefaultHardCap) continue;
    const double x = 2 + fi.gamma * ti - two_family_threshold(fi.gamma, ti, gj, tj);
    EXPECT_NEAR(x, fi.gamma / (2 * fi.p), 1e-9 * (1 + x));
  }
}

TEST(BestResponseTwoFamily, Monotonicity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> g(1, 10), p(0.1, 2), t(0, 10), d(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto fi = fam(g(rng), p(rng));
    const double gj = g(rng), tj = t(rng), step = d(rng);
    const double base = best_response_two_family(fi, gj, tj);
    EXPECT_LE(base, best_response_two_family(fi, gj, tj + step));
    EXPECT_LE(base, best_response_two_family(fi, gj + step, tj));
    EXPECT_GE(base, best_response_two_family(fam(fi.gamma, fi.p + step), gj, tj));
  }
}

TEST(NumericOracle, Examples) {
  const auto f = fam(3, 0.5);
  EXPECT_NEAR(best_response_numeric_oracle([&](double t) { return committed_utility(f, t, 0); }),
              4.0 / 3.0, 1e-6);
  EXPECT_EQ(best_response_numeric_oracle([](double) { return 1.0; }), 0.0);
  EXPECT_EQ(best_response_numeric_oracle([](double t) { return -t * t - t; }), 0.0);
}

TEST(NumericOracle, AgreesWithDenseGrid) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> g(1, 10), p(0.1, 2), s(0, 20);
  for (int i = 0; i < 20; ++i) {
    const auto f = fam(g(rng), p(rng));
    const double cut = s(rng);
    auto u = [&](double t) { return committed_utility(f, t, cut); };
    EXPECT_NEAR(best_response_numeric_oracle(u), oracle::dense_argmax(u, 0, 24, 2400000), 2e-5);
  }
}

TEST(NumericOracle, RightCornerAndInteriorPeak) {
  EXPECT_NEAR(best_response_numeric_oracle([](double t) { return t; }), kDefaultHardCap, 1e-12);
  EXPECT_NEAR(best_response_numeric_oracle([](double t) { return -(t - 7.123456) * (t - 7.123456); }),
              7.123456, 1e-6);
}

TEST(ObeyDisobeyGame, UnequalAptitudes) {
  const auto g = build_obey_disobey_game(setup(5, 4));
  EXPECT_NEAR(finite(g, O, O).u1, std::log(3.0) - 1.0, 1e-12);
  EXPECT_EQ(finite(g, O, O).u2, -1.0);
  EXPECT_NEAR(finite(g, D, O).u1, std::log(5.0) - 1.4, 1e-12);
  EXPECT_NEAR(finite(g, D, O).t1, 2.8, 1e-12);
  EXPECT_EQ(finite(g, D, O).u2, -1.0);
  EXPECT_EQ(finite(g, O, D).u1, -1.0);
  EXPECT_NEAR(finite(g, O, D).u2, std::log(4.0) - 1.75, 1e-12);
  EXPECT_NEAR(finite(g, O, D).t2, 3.5, 1e-12);
  ASSERT_FALSE(g.is_finite(D, D));
  const auto& d = std::get<DivergentCell>(g.at(D, D));
  EXPECT_NEAR(d.escalation_rate, 2.0, 1e-12);
  // ln 5 - (4 t2 + 6)/10 and ln 4 - (5 t1 + 4)/8 while interior
  EXPECT_NEAR(d.u1_of_t2.evaluate(1.0), std::log(5.0) - 1.0, 1e-12);
  EXPECT_NEAR(d.u2_of_t1.evaluate(2.0), std::log(4.0) - 14.0 / 8.0, 1e-12);
  EXPECT_EQ(d.u1_of_t2.render(), "ln(5) - (0.4*t2 + 0.6)");
  EXPECT_EQ(d.u2_of_t1.render(), "ln(4) - (0.625*t1 + 0.5)");
}

TEST(ObeyDisobeyGame, EqualAptitudes) {
  const auto g = build_obey_disobey_game(setup(5, 5));
  EXPECT_NEAR(finite(g, O, O).u1, std::log(2.0) - 1.0, 1e-12);
  EXPECT_NEAR(finite(g, O, O).u2, std::log(2.0) - 1.0, 1e-12);
  EXPECT_NEAR(finite(g, D, O).u1, std::log(5.0) - 1.6, 1e-12);
  EXPECT_EQ(finite(g, D, O).u2, -1.0);
  EXPECT_NEAR(finite(g, O, D).u2, std::log(5.0) - 1.6, 1e-12);
  const auto& d = std::get<DivergentCell>(g.at(D, D));
  EXPECT_NEAR(d.escalation_rate, 2.4, 1e-12);
  // both-disobey payoff uses ln(gamma/(2P)) = ln 5
  EXPECT_EQ(d.u1_of_t2.render(), "ln(5) - (0.5*t2 + 0.6)");
}

TEST(ObeyDisobeyGame, ZeroGapGivesFiniteFixedPoint) {
  // gamma/P sums to 8: BR1 o BR2 is the identity
  const auto s = setup(2, 2);
  EXPECT_DOUBLE_EQ(divergence_gap(s), 0.0);
  const auto g = build_obey_disobey_game(s);
  ASSERT_TRUE(g.is_finite(D, D));
  const auto& c = finite(g, D, D);
  EXPECT_NEAR(best_response_two_family(s.fam1, 2, c.t2), c.t1, 1e-9);
  EXPECT_NEAR(best_response_two_family(s.fam2, 2, c.t1), c.t2, 1e-9);
}

TEST(ObeyDisobeyGame, FirstBest) {
  const auto fb_unequal = first_best_finite(build_obey_disobey_game(setup(5, 4)));
  EXPECT_EQ(fb_unequal.a1, D);
  EXPECT_EQ(fb_unequal.a2, O);
  EXPECT_NEAR(fb_unequal.welfare, std::log(5.0) - 2.4, 1e-12);
  const auto fb_equal = first_best_finite(build_obey_disobey_game(setup(5, 5)));
  EXPECT_EQ(fb_equal.a1, O);
  EXPECT_EQ(fb_equal.a2, O);
  EXPECT_NEAR(fb_equal.welfare, 2 * (std::log(2.0) - 1.0), 1e-12);
}

TEST(ObeyDisobeyGame, RejectsInvalidSetup) {
  EXPECT_THROW(build_obey_disobey_game(setup(5, 4, 0.5, 0.0)), InvalidArgument);
  EXPECT_THROW(build_obey_disobey_game(setup(-5, 4)), InvalidArgument);
}

TEST(Dominance, DisobeyImprovesBothFamilies) {
  const auto r = analyze_dominance(build_obey_disobey_game(setup(5, 4)));
  EXPECT_NEAR(r.reference_profile.first, 2.8, 1e-12);
  EXPECT_NEAR(r.reference_profile.second, 3.5, 1e-12);
  const auto& f1 = r.gains[0][0];
  EXPECT_NEAR(f1.u_obey, 0.0986, 5e-5);
  EXPECT_NEAR(f1.u_disobey, 0.2094, 5e-5);
  EXPECT_TRUE(f1.strictly_improves);
  const auto& f2 = r.gains[1][0];
  EXPECT_EQ(f2.u_obey, -1.0);
  EXPECT_NEAR(f2.u_disobey, std::log(4.0) - 1.75, 1e-12);
  EXPECT_TRUE(f2.strictly_improves);
  EXPECT_TRUE(r.disobey_dominant[0]);
  EXPECT_TRUE(r.disobey_dominant[1]);
  EXPECT_TRUE(r.pure_nash.empty());
  ASSERT_EQ(r.divergent_candidates.size(), 1u);
  EXPECT_EQ(r.divergent_candidates[0], std::make_pair(D, D));
}

TEST(Dominance, IdenticalPayoffsNoStrictImprovement) {
  ObeyDisobeyGame g{setup(5, 5), {}};
  for (auto& row : g.cells)
    for (auto& c : row) c = FiniteCell{2, 2, 0.25, 0.25};
  const auto r = analyze_dominance(g);
  for (const auto& fam_gains : r.gains)
    for (const auto& gain : fam_gains) EXPECT_FALSE(gain.strictly_improves);
  EXPECT_EQ(r.pure_nash.size(), 4u);
  EXPECT_TRUE(r.divergent_cells.empty());
}

TEST(Dynamics, UnequalEscalatesByTwoPerRoundTrip) {
  const auto tr = best_response_dynamics(setup(5, 4), {2, 2}, 100);
  EXPECT_EQ(tr.stop, DynamicsStop::HitCap);
  EXPECT_NEAR(tr.profiles[1].first, 2.8, 1e-12);
  EXPECT_NEAR(tr.profiles[1].second, 3.5, 1e-12);
  for (std::size_t r = 0; r + 2 < tr.profiles.size(); ++r) {
    if (tr.profiles[r + 2].first >= kDefaultHardCap) break;
    EXPECT_NEAR(tr.profiles[r + 2].first - tr.profiles[r].first, 2.0, 1e-9);
  }
}

TEST(Dynamics, ZeroGapStationaryAfterOneUpdate) {
  const auto s = setup(2, 2);
  const auto tr = best_response_dynamics(s, {1, 3}, 10, UpdateScheme::Alternating);
  EXPECT_EQ(tr.stop, DynamicsStop::Converged);
  ASSERT_EQ(tr.profiles.size(), 3u);
  EXPECT_EQ(tr.profiles[1], tr.profiles[2]);
}

TEST(Dynamics, OneRoundAppliesOneUpdate) {
  const auto tr = best_response_dynamics(setup(5, 4), {2, 2}, 1);
  EXPECT_EQ(tr.profiles.size(), 2u);
  EXPECT_EQ(tr.stop, DynamicsStop::RoundsExhausted);
  EXPECT_THROW(best_response_dynamics(setup(5, 4), {2, 2}, 0), InvalidArgument);
}

TEST(Dynamics, AlternatingRoundIsOneRoundTrip) {
  const auto tr = best_response_dynamics(setup(5, 5), {2, 2}, 100, UpdateScheme::Alternating);
  for (std::size_t r = 1; r + 1 < tr.profiles.size(); ++r) {
    if (tr.profiles[r + 1].first >= kDefaultHardCap || tr.profiles[r + 1].second >= kDefaultHardCap) break;
    EXPECT_NEAR(tr.profiles[r + 1].first - tr.profiles[r].first, 2.4, 1e-9);
  }
}

TEST(Dynamics, DivergenceCriterionMatchesBehavior) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> g(1, 6), p(0.5, 2);
  for (int i = 0; i < 200; ++i) {
    const double pc = p(rng);
    auto s = setup(g(rng), g(rng), pc);
    if (i % 10 == 0) s.fam2.gamma = 8 * pc - s.fam1.gamma;  // force gap = 0
    if (s.fam2.gamma <= 0) continue;
    const auto game = build_obey_disobey_game(s);
    const auto tr = best_response_dynamics(s, {s.t_obey, s.t_obey}, 400, UpdateScheme::Alternating);
    if (game.is_finite(D, D)) {
      EXPECT_EQ(tr.stop, DynamicsStop::Converged);
    } else {
      // negative drift ends pinned at zero effort, positive drift at the cap
      const auto& d = std::get<DivergentCell>(game.at(D, D));
      if (d.delta > 0.1) EXPECT_EQ(tr.stop, DynamicsStop::HitCap);
      if (d.delta < -0.1) EXPECT_EQ(tr.stop, DynamicsStop::Converged);
    }
  }
}
