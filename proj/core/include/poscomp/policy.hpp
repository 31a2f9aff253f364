#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "poscomp/population.hpp"
#include "poscomp/signaling.hpp"

namespace poscomp {

struct CeeBaseline {};

struct Diversion {
  double keep_fraction = 0.5;
  double subsidy = 0.0;
  // Rank on scores after one simulated round instead of round 0.
  bool rank_after_first_round = false;
};

struct BetaReduction {
  WageModel wages;  // wages.beta is the pre-policy bias
  double beta_target = 1.0;
  double s_cut = 12.0;
  double wage_p = 250.0;
};

struct ExamRedesign {
  double aptitude_weight = 1.0;
};

using ScenarioKind = std::variant<CeeBaseline, Diversion, BetaReduction, ExamRedesign>;

struct PolicyScenario {
  std::string name;
  ScenarioKind kind;
  PopulationSpec base_pop;
  SimConfig sim;

  void validate() const;
};

struct EquityMetrics {
  double participation_share = 1.0;
  double utility_gini = 0.0;
  double excluded_utility_gap = 0.0;
};

struct PolicyReport {
  std::string name;
  std::string kind;
  std::string units = "utility";
  double welfare_total = 0.0;
  double welfare_mean = 0.0;
  double welfare_mean_competitors = 0.0;
  double s_cut_final = 0.0;
  double sigma_s_final = 0.0;
  double mean_effort = 0.0;
  EquityMetrics equity;
  std::string status;
  std::optional<double> baseline_mean_effort;
  std::optional<double> mean_effort_reduction;

  void check_invariants() const;
};

PolicyReport run_cee_baseline(std::span<const FamilyParams> families,
                              const SimConfig& sim);
PolicyReport run_cee_baseline(const PopulationSpec& pop, const SimConfig& sim);

// Throws DegeneratePool when fewer than two families are kept.
PolicyReport run_diversion(std::span<const FamilyParams> families,
                           const SimConfig& sim, const Diversion& d);
PolicyReport run_diversion(const PopulationSpec& pop, const SimConfig& sim,
                           const Diversion& d);

// Top-ranked families kept by the diversion rule (indices into families).
std::vector<std::size_t> diversion_pool(std::span<const FamilyParams> families,
                                        const SimConfig& sim, const Diversion& d);

// Reports before and after lowering the credential bias.
std::pair<PolicyReport, PolicyReport> run_beta_reduction(
    std::span<const FamilyParams> families, const BetaReduction& b);
std::pair<PolicyReport, PolicyReport> run_beta_reduction(const PopulationSpec& pop,
                                                         const BetaReduction& b);

// Scores become gamma^a * t.
std::vector<FamilyParams> emphasize_aptitude(std::span<const FamilyParams> families,
                                             double aptitude_weight);
PolicyReport run_exam_redesign(std::span<const FamilyParams> families,
                               const SimConfig& sim, double aptitude_weight);
PolicyReport run_exam_redesign(const PopulationSpec& pop, const SimConfig& sim,
                               double aptitude_weight);

// Runs one scenario. BetaReduction yields two reports, others one.
std::vector<PolicyReport> run_scenario(const PolicyScenario& scenario);

// Welfare axis is welfare_mean_competitors; equity axis is
// participation_share. Dominance: at least as good on both, better on one.
struct PairComparison {
  std::string a;
  std::string b;
  bool a_dominates = false;
  bool b_dominates = false;
  // One side wins on welfare while losing on participation share.
  bool dilemma = false;
  // Name of the higher-welfare side when dilemma is set.
  std::string welfare_leader;
};

struct TradeoffTable {
  std::vector<PolicyReport> rows;  // sorted by name
  std::vector<PairComparison> comparisons;
};

// Order-invariant: rows are sorted by name before pairing.
TradeoffTable compare_policies(std::span<const PolicyReport> reports);

}  // namespace poscomp
