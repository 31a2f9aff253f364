#include "poscomp/signaling.hpp"

#include <cmath>

#include "poscomp/errors.hpp"

namespace poscomp {

void WageModel::validate() const {
  if (!(w_low > 0.0) || !(w_high > w_low) || !std::isfinite(w_high)) {
    throw InvalidArgument("wages need w_high > w_low > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be > 0");
}

const char* to_string(Participation p) {
  return p == Participation::Study ? "study" : "quit";
}

double signaling_time_to_threshold(const FamilyParams& fam, double s_cut) {
  fam.validate();
  if (!(s_cut >= 0.0)) throw InvalidArgument("s_cut must be >= 0");
  return s_cut / fam.gamma;
}

double signaling_cost_to_threshold(const FamilyParams& fam, double s_cut, double wage_p) {
  if (!(wage_p >= 0.0)) throw InvalidArgument("wage_p must be >= 0");
  return wage_p * signaling_time_to_threshold(fam, s_cut);
}

ParticipationDecision decide_participation(double cost_to_threshold,
                                           const WageModel& wages, bool use_bias,
                                           double t_needed) {
  wages.validate();
  if (!(cost_to_threshold >= 0.0)) throw InvalidArgument("cost must be >= 0");
  const double study = wages.w_high - cost_to_threshold;
  const double perceived = (use_bias ? wages.w_high * wages.beta : wages.w_high) - cost_to_threshold;

  ParticipationDecision d;
  d.cost = cost_to_threshold;
  if (perceived > wages.w_low) {
    d.choice = Participation::Study;
    d.t_needed = t_needed;
    d.payoff = study;
    d.counterfactual_payoff = wages.w_low;
  } else {
    d.choice = Participation::Quit;
    d.payoff = wages.w_low;
    d.counterfactual_payoff = study;
  }
  return d;
}

double utility_signaling(const FamilyParams& fam, Effort t, double s_cut,
                         const WageModel& wages, double wage_p) {
  wages.validate();
  const double s = score(fam.gamma, t);
  const double c = wage_p * t.hours();
  if (s >= s_cut) return wages.w_high * wages.beta * std::log(2.0 + s - s_cut) - c;
  return wages.w_low - c;
}

std::vector<ParticipationDecision> participation_decisions(
    std::span<const FamilyParams> families, const WageModel& wages, double s_cut,
    double wage_p, bool use_bias) {
  std::vector<ParticipationDecision> out;
  out.reserve(families.size());
  for (const auto& f : families) {
    const double t = signaling_time_to_threshold(f, s_cut);
    out.push_back(decide_participation(wage_p * t, wages, use_bias, t));
  }
  return out;
}

std::vector<BetaRow> beta_sensitivity(std::span<const FamilyParams> families,
                                      const WageModel& wages, double s_cut,
                                      double wage_p, std::span<const double> beta_grid) {
  if (beta_grid.empty()) throw InvalidArgument("beta grid is empty");
  if (families.empty()) throw InvalidArgument("no families");
  std::vector<BetaRow> rows;
  for (double beta : beta_grid) {
    WageModel w = wages;
    w.beta = beta;
    const auto ds = participation_decisions(families, w, s_cut, wage_p, true);
    int studying = 0;
    double payoff = 0.0;
    for (const auto& d : ds) {
      if (d.choice == Participation::Study) ++studying;
      payoff += d.payoff;
    }
    const double n = static_cast<double>(ds.size());
    rows.push_back({beta, studying / n, payoff / n});
  }
  return rows;
}

std::vector<BetaRow> beta_sensitivity(const PopulationSpec& pop, const WageModel& wages,
                                      double s_cut, double wage_p,
                                      std::span<const double> beta_grid) {
  const auto families = sample_population(pop);
  return beta_sensitivity(families, wages, s_cut, wage_p, beta_grid);
}

}  // namespace poscomp
