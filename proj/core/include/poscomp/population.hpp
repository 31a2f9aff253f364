#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "poscomp/model.hpp"

namespace poscomp {

struct UniformDist {
  double lo = 0.0;
  double hi = 1.0;
};

// Truncated below at `min` by rejection.
struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;
  double min = 1e-6;
};

struct LogNormalDist {
  double mu = 0.0;
  double sigma = 1.0;
};

// One value broadcasts to every family; otherwise one value per family.
struct ExplicitDist {
  std::vector<double> values;
};

using Distribution = std::variant<UniformDist, NormalDist, LogNormalDist, ExplicitDist>;

struct PopulationSpec {
  int n = 2;
  Distribution gamma_dist = ExplicitDist{{1.0}};
  Distribution p_dist = ExplicitDist{{0.5}};
  Rationality rationality = Rationality::Bounded;
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<FamilyParams> sample_population(const PopulationSpec& spec);

struct SimConfig {
  ThresholdSpec threshold = ThresholdSpec::mean_plus_k_sigma(0.0);
  double initial_effort = 2.0;
  // Per-family override of initial_effort when non-empty.
  std::vector<double> initial_efforts;
  int rounds_max = 50;
  double divergence_cap = 1e6;
  double quit_payoff = 0.0;
  double t_hard_cap = kDefaultHardCap;
  // Keep quitters in the threshold pool at score 0 instead of dropping them.
  bool quitters_in_pool = false;

  void validate() const;
};

enum class SimStatus { MaxRounds, Converged, Diverged, EmptyPopulation };

const char* to_string(SimStatus s);

struct RoundRecord {
  int round = 0;
  std::vector<double> efforts;
  std::vector<double> scores;
  std::vector<double> utilities;
  std::vector<bool> active;
  // The threshold formed from this round's scores.
  double s_cut = 0.0;
  // The threshold this round's decisions (and utilities) were made against.
  double s_cut_faced = 0.0;
  double sigma_s = 0.0;
  double mean_t = 0.0;
  double welfare_total = 0.0;
  double welfare_mean = 0.0;
  int n_active = 0;
  int n_exhausted = 0;
};

struct SimTrace {
  std::vector<FamilyParams> families;
  std::vector<RoundRecord> rounds;
  SimStatus status = SimStatus::MaxRounds;
};

// 1/P + (s_cut - 2)/gamma clamped to [0, cap].
double best_response_population(const FamilyParams& fam, double s_cut,
                                double t_hard_cap = kDefaultHardCap);

// Larger root of ln(2 + gamma t) = P t: the effort past which even an
// uncontested family's utility is negative and falling.
double max_noncompetitive_time(const FamilyParams& fam,
                               double t_hard_cap = kDefaultHardCap);

// Bounded families always play the best response; Rational ones quit
// (t = 0) when the best-response utility is below quit_payoff.
double decide_effort(const FamilyParams& fam, double s_cut, double quit_payoff,
                     double t_hard_cap = kDefaultHardCap);

SimTrace simulate_feedback(std::span<const FamilyParams> families,
                           const SimConfig& cfg);
SimTrace simulate_feedback(const PopulationSpec& pop, const SimConfig& cfg);

struct RoundSummary {
  int round = 0;
  double s_cut = 0.0;
  double mean_t = 0.0;
  double welfare_total = 0.0;
  double welfare_mean = 0.0;
};

struct WelfareSummary {
  std::vector<RoundSummary> per_round;
  double total_utility = 0.0;
  double mean_utility = 0.0;
  double mean_effort = 0.0;
  double exhausted_fraction = 0.0;
  double quit_fraction = 0.0;
  std::vector<double> s_cut_path;
  SimStatus status = SimStatus::MaxRounds;
};

WelfareSummary welfare_report(const SimTrace& trace);

}  // namespace poscomp
