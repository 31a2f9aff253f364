#pragma once

#include <span>
#include <vector>

#include "poscomp/model.hpp"
#include "poscomp/population.hpp"

namespace poscomp {

// Wages with and without the credential, and the perceived multiplier on
// the credential wage. All signaling quantities are in money units.
struct WageModel {
  double w_high = 2000.0;
  double w_low = 1000.0;
  double beta = 1.0;

  void validate() const;
};

enum class Participation { Study, Quit };

const char* to_string(Participation p);

struct ParticipationDecision {
  Participation choice = Participation::Quit;
  double t_needed = 0.0;
  double cost = 0.0;
  // Realized (unbiased) payoff of the chosen option.
  double payoff = 0.0;
  // Realized payoff of the option not chosen.
  double counterfactual_payoff = 0.0;
};

// Hours needed to just reach the cut.
double signaling_time_to_threshold(const FamilyParams& fam, double s_cut);

// wage_p * s_cut / gamma.
double signaling_cost_to_threshold(const FamilyParams& fam, double s_cut,
                                   double wage_p);

// Study iff the (possibly beta-inflated) credential wage net of cost is
// strictly above w_low. Ties quit.
ParticipationDecision decide_participation(double cost_to_threshold,
                                           const WageModel& wages, bool use_bias,
                                           double t_needed = 0.0);

// Pass branch: w_high * beta * ln(2 + S - s_cut) - wage_p t.
// Fail branch: w_low - wage_p t.
double utility_signaling(const FamilyParams& fam, Effort t, double s_cut,
                         const WageModel& wages, double wage_p);

struct BetaRow {
  double beta = 0.0;
  double participation_rate = 0.0;
  double mean_payoff = 0.0;
};

std::vector<ParticipationDecision> participation_decisions(
    std::span<const FamilyParams> families, const WageModel& wages, double s_cut,
    double wage_p, bool use_bias);

std::vector<BetaRow> beta_sensitivity(std::span<const FamilyParams> families,
                                      const WageModel& wages, double s_cut,
                                      double wage_p,
                                      std::span<const double> beta_grid);
std::vector<BetaRow> beta_sensitivity(const PopulationSpec& pop,
                                      const WageModel& wages, double s_cut,
                                      double wage_p,
                                      std::span<const double> beta_grid);

inline const std::vector<double>& default_beta_grid() {
  static const std::vector<double> grid{1.0, 2.0, 5.0, 10.0, 20.0};
  return grid;
}

}  // namespace poscomp
