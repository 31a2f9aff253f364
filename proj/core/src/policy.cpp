#include "poscomp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poscomp/errors.hpp"
#include "poscomp/stats.hpp"

namespace poscomp {

namespace {

struct KindName {
  const char* operator()(const CeeBaseline&) const { return "cee"; }
  const char* operator()(const Diversion&) const { return "diversion"; }
  const char* operator()(const BetaReduction&) const { return "beta_reduction"; }
  const char* operator()(const ExamRedesign&) const { return "exam_redesign"; }
};

// Report over the original population; `pool` indexes the families that
// competed in `trace`, everyone else receives `subsidy`.
PolicyReport report_from_trace(const SimTrace& trace, std::size_t n_original,
                               double subsidy) {
  const RoundRecord& last = trace.rounds.back();
  const std::size_t n_pool = last.utilities.size();
  const std::size_t excluded = n_original - n_pool;

  std::vector<double> all(last.utilities);
  all.insert(all.end(), excluded, subsidy);

  PolicyReport r;
  r.welfare_total = stats::sum(all);
  r.welfare_mean = r.welfare_total / static_cast<double>(n_original);
  r.welfare_mean_competitors = stats::mean(last.utilities);
  r.s_cut_final = last.s_cut;
  r.sigma_s_final = last.sigma_s;
  r.mean_effort = last.mean_t;
  r.equity.participation_share = static_cast<double>(n_pool) / static_cast<double>(n_original);
  r.equity.utility_gini = stats::shifted_gini(all);
  r.equity.excluded_utility_gap = excluded > 0 ? r.welfare_mean_competitors - subsidy : 0.0;
  r.status = to_string(trace.status);
  return r;
}

PolicyReport signaling_report(std::span<const FamilyParams> families,
                              const BetaReduction& b, double beta) {
  WageModel w = b.wages;
  w.beta = beta;
  const auto ds = participation_decisions(families, w, b.s_cut, b.wage_p, true);

  std::vector<double> payoffs;
  std::vector<double> study_payoffs;
  std::vector<double> efforts;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    payoffs.push_back(ds[i].payoff);
    if (ds[i].choice != Participation::Study) continue;
    study_payoffs.push_back(ds[i].payoff);
    efforts.push_back(ds[i].t_needed);
    ratios.push_back(families[i].gamma / families[i].p);
  }

  PolicyReport r;
  r.units = "money";
  r.welfare_total = stats::sum(payoffs);
  r.welfare_mean = r.welfare_total / static_cast<double>(ds.size());
  r.welfare_mean_competitors = stats::mean(study_payoffs);
  r.s_cut_final = b.s_cut;
  r.sigma_s_final = stats::pstdev(ratios);
  r.mean_effort = stats::mean(efforts);
  r.equity.participation_share =
      static_cast<double>(study_payoffs.size()) / static_cast<double>(ds.size());
  r.equity.utility_gini = stats::shifted_gini(payoffs);
  r.equity.excluded_utility_gap =
      study_payoffs.size() < ds.size() ? r.welfare_mean_competitors - w.w_low : 0.0;
  r.status = "static";
  return r;
}

}  // namespace

void PolicyScenario::validate() const {
  base_pop.validate();
  sim.validate();
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Diversion>) {
          if (!(k.keep_fraction > 0.0 && k.keep_fraction <= 1.0)) {
            throw InvalidArgument("keep_fraction must lie in (0, 1]");
          }
          if (!std::isfinite(k.subsidy)) throw InvalidArgument("subsidy must be finite");
        } else if constexpr (std::is_same_v<T, BetaReduction>) {
          k.wages.validate();
          if (!(k.beta_target > 0.0)) throw InvalidArgument("beta_target must be > 0");
          if (!(k.s_cut >= 0.0)) throw InvalidArgument("s_cut must be >= 0");
          if (!(k.wage_p >= 0.0)) throw InvalidArgument("wage_p must be >= 0");
        } else if constexpr (std::is_same_v<T, ExamRedesign>) {
          if (!(k.aptitude_weight >= 1.0)) throw InvalidArgument("aptitude_weight must be >= 1");
        }
      },
      kind);
}

void PolicyReport::check_invariants() const {
  if (!(equity.participation_share >= 0.0 && equity.participation_share <= 1.0)) {
    throw InvalidArgument("participation_share outside [0, 1]");
  }
  if (!(equity.utility_gini >= 0.0 && equity.utility_gini <= 1.0)) {
    throw InvalidArgument("utility_gini outside [0, 1]");
  }
}

PolicyReport run_cee_baseline(std::span<const FamilyParams> families, const SimConfig& sim) {
  const SimTrace trace = simulate_feedback(families, sim);
  PolicyReport r = report_from_trace(trace, families.size(), 0.0);
  r.kind = "cee";
  return r;
}

PolicyReport run_cee_baseline(const PopulationSpec& pop, const SimConfig& sim) {
  const auto families = sample_population(pop);
  return run_cee_baseline(families, sim);
}

std::vector<std::size_t> diversion_pool(std::span<const FamilyParams> families,
                                        const SimConfig& sim, const Diversion& d) {
  if (!(d.keep_fraction > 0.0 && d.keep_fraction <= 1.0)) {
    throw InvalidArgument("keep_fraction must lie in (0, 1]");
  }
  const std::size_t n = families.size();
  std::vector<double> rank_scores(n);
  if (d.rank_after_first_round) {
    SimConfig one = sim;
    one.rounds_max = 1;
    const SimTrace t = simulate_feedback(families, one);
    rank_scores = t.rounds.back().scores;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double t0 = sim.initial_efforts.empty() ? sim.initial_effort : sim.initial_efforts[i];
      rank_scores[i] = families[i].gamma * t0;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rank_scores[a] > rank_scores[b];
  });
  const auto keep = static_cast<std::size_t>(
      std::llround(d.keep_fraction * static_cast<double>(n)));
  order.resize(std::min(keep, n));
  std::sort(order.begin(), order.end());
  return order;
}

PolicyReport run_diversion(std::span<const FamilyParams> families, const SimConfig& sim,
                           const Diversion& d) {
  const auto pool_idx = diversion_pool(families, sim, d);
  if (pool_idx.size() < 2) {
    throw DegeneratePool("diversion keeps " + std::to_string(pool_idx.size()) +
                         " families; at least 2 are needed");
  }
  std::vector<FamilyParams> pool;
  SimConfig pool_sim = sim;
  pool_sim.initial_efforts.clear();
  for (std::size_t i : pool_idx) {
    pool.push_back(families[i]);
    if (!sim.initial_efforts.empty()) pool_sim.initial_efforts.push_back(sim.initial_efforts[i]);
  }
  const SimTrace trace = simulate_feedback(pool, pool_sim);
  PolicyReport r = report_from_trace(trace, families.size(), d.subsidy);
  r.kind = "diversion";
  return r;
}

PolicyReport run_diversion(const PopulationSpec& pop, const SimConfig& sim, const Diversion& d) {
  const auto families = sample_population(pop);
  return run_diversion(families, sim, d);
}

std::pair<PolicyReport, PolicyReport> run_beta_reduction(std::span<const FamilyParams> families,
                                                         const BetaReduction& b) {
  b.wages.validate();
  if (!(b.beta_target > 0.0)) throw InvalidArgument("beta_target must be > 0");
  if (families.empty()) throw InvalidArgument("no families");
  PolicyReport before = signaling_report(families, b, b.wages.beta);
  PolicyReport after = signaling_report(families, b, b.beta_target);
  before.kind = after.kind = "beta_reduction";
  return {before, after};
}

std::pair<PolicyReport, PolicyReport> run_beta_reduction(const PopulationSpec& pop,
                                                         const BetaReduction& b) {
  const auto families = sample_population(pop);
  return run_beta_reduction(families, b);
}

std::vector<FamilyParams> emphasize_aptitude(std::span<const FamilyParams> families,
                                             double aptitude_weight) {
  if (!(aptitude_weight >= 1.0)) throw InvalidArgument("aptitude_weight must be >= 1");
  std::vector<FamilyParams> out(families.begin(), families.end());
  if (aptitude_weight == 1.0) return out;
  for (auto& f : out) f.gamma = std::pow(f.gamma, aptitude_weight);
  return out;
}

PolicyReport run_exam_redesign(std::span<const FamilyParams> families, const SimConfig& sim,
                               double aptitude_weight) {
  const auto weighted = emphasize_aptitude(families, aptitude_weight);
  PolicyReport r = report_from_trace(simulate_feedback(weighted, sim), families.size(), 0.0);
  r.kind = "exam_redesign";
  const PolicyReport baseline = run_cee_baseline(families, sim);
  r.baseline_mean_effort = baseline.mean_effort;
  r.mean_effort_reduction = baseline.mean_effort - r.mean_effort;
  return r;
}

PolicyReport run_exam_redesign(const PopulationSpec& pop, const SimConfig& sim,
                               double aptitude_weight) {
  const auto families = sample_population(pop);
  return run_exam_redesign(families, sim, aptitude_weight);
}

std::vector<PolicyReport> run_scenario(const PolicyScenario& scenario) {
  scenario.validate();
  const auto families = sample_population(scenario.base_pop);
  std::vector<PolicyReport> out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, CeeBaseline>) {
          out.push_back(run_cee_baseline(families, scenario.sim));
        } else if constexpr (std::is_same_v<T, Diversion>) {
          out.push_back(run_diversion(families, scenario.sim, k));
        } else if constexpr (std::is_same_v<T, BetaReduction>) {
          auto [before, after] = run_beta_reduction(families, k);
          before.name = scenario.name + "@before";
          after.name = scenario.name + "@after";
          out.push_back(std::move(before));
          out.push_back(std::move(after));
        } else {
          out.push_back(run_exam_redesign(families, scenario.sim, k.aptitude_weight));
        }
      },
      scenario.kind);
  if (out.size() == 1) out.front().name = scenario.name;
  for (auto& r : out) {
    r.kind = std::visit(KindName{}, scenario.kind);
    r.check_invariants();
  }
  return out;
}

TradeoffTable compare_policies(std::span<const PolicyReport> reports) {
  if (reports.size() < 2) throw InvalidArgument("comparison needs at least two reports");
  TradeoffTable table;
  table.rows.assign(reports.begin(), reports.end());
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& x, const auto& y) {
    if (x.name != y.name) return x.name < y.name;
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.welfare_mean_competitors != y.welfare_mean_competitors) {
      return x.welfare_mean_competitors < y.welfare_mean_competitors;
    }
    return x.equity.participation_share < y.equity.participation_share;
  });

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
      const auto& a = table.rows[i];
      const auto& b = table.rows[j];
      if (a.units != b.units) continue;
      const double wa = a.welfare_mean_competitors, wb = b.welfare_mean_competitors;
      const double pa = a.equity.participation_share, pb = b.equity.participation_share;
      PairComparison c;
      c.a = a.name;
      c.b = b.name;
      c.a_dominates = wa >= wb && pa >= pb && (wa > wb || pa > pb);
      c.b_dominates = wb >= wa && pb >= pa && (wb > wa || pb > pa);
      if (wa > wb && pa < pb) {
        c.dilemma = true;
        c.welfare_leader = a.name;
      } else if (wb > wa && pb < pa) {
        c.dilemma = true;
        c.welfare_leader = b.name;
      }
      table.comparisons.push_back(std::move(c));
    }
  }
  return table;
}

}  // namespace poscomp
