#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "poscomp/model.hpp"

namespace poscomp {

// Two families facing a burden-reduction rule that caps study at t_obey.
struct TwoFamilySetup {
  FamilyParams fam1;
  FamilyParams fam2;
  double t_obey = 2.0;
  double t_hard_cap = kDefaultHardCap;

  void validate() const;
};

enum class Action { Obey = 0, Disobey = 1 };

const char* to_string(Action a);

// In the two-family game the cut is the mean of both scores.
double two_family_threshold(double gamma_i, double t_i, double gamma_j,
                            double t_j);

// d u_i / d t_i on the log branch, (gamma_i / 2) / x - P_i with
// x = 2 + S_i - (S_i + S_j) / 2. Throws DomainError when x <= 0.
double marginal_utility_two_family(const FamilyParams& fam_i,
                                   const FamilyParams& fam_j, double t_i,
                                   double t_j);

// -(gamma_i / 2)^2 / x^2; same domain as the first derivative.
double curvature_two_family(const FamilyParams& fam_i,
                            const FamilyParams& fam_j, double t_i, double t_j);

// max(0, 1/P_i + (gamma_j t_j - 4) / gamma_i), clamped to the cap.
double best_response_two_family(const FamilyParams& fam_i, double gamma_j,
                                double t_j, double t_hard_cap = kDefaultHardCap);

// Argmax of an arbitrary utility over [0, t_hard_cap]: dense grid scan with
// a golden-section polish around the best grid point. Ties resolve to the
// leftmost maximizer, so flat or decreasing functions return 0.
double best_response_numeric_oracle(const std::function<double(double)>& utility_fn,
                                    double t_hard_cap = kDefaultHardCap);

// Payoff of a family that best-responds to the opponent's effort, as a
// function of that effort. Renders as "ln(a) - (b*t + c)" on the interior.
struct ParametricPayoff {
  FamilyParams self;
  FamilyParams other;
  double t_hard_cap = kDefaultHardCap;
  // 1 or 2: which family `self` is, used only for rendering "t1"/"t2".
  int self_index = 1;

  double best_response(double t_other) const;
  double evaluate(double t_other) const;
  std::string render() const;
};

struct FiniteCell {
  double t1 = 0.0;
  double t2 = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
};

// Mutual best responses with no finite fixed point. `delta` is family 1's
// signed effort change per best-response round trip.
struct DivergentCell {
  double escalation_rate = 0.0;
  double delta = 0.0;
  ParametricPayoff u1_of_t2;
  ParametricPayoff u2_of_t1;
};

using GameCell = std::variant<FiniteCell, DivergentCell>;

struct ObeyDisobeyGame {
  TwoFamilySetup setup;
  // cells[action of family 1][action of family 2]
  std::array<std::array<GameCell, 2>, 2> cells;

  const GameCell& at(Action a1, Action a2) const {
    return cells[static_cast<int>(a1)][static_cast<int>(a2)];
  }
  bool is_finite(Action a1, Action a2) const {
    return std::holds_alternative<FiniteCell>(at(a1, a2));
  }
  // Payoffs of a cell; Divergent cells are evaluated through their
  // parametric forms at `reference`.
  std::pair<double, double> payoffs(Action a1, Action a2,
                                    std::pair<double, double> reference) const;
};

// gamma1/P1 + gamma2/P2 - 8; zero means every mutual best response
// composes to the identity and a finite fixed point exists.
double divergence_gap(const TwoFamilySetup& setup);

ObeyDisobeyGame build_obey_disobey_game(const TwoFamilySetup& setup);

struct FirstBest {
  Action a1 = Action::Obey;
  Action a2 = Action::Obey;
  double welfare = 0.0;  // u1 + u2
};

// Finite cell with the largest u1 + u2 (first in row-major order on ties).
FirstBest first_best_finite(const ObeyDisobeyGame& game);

struct DisobeyGain {
  Action opponent = Action::Obey;
  double u_obey = 0.0;
  double u_disobey = 0.0;
  bool strictly_improves = false;
};

struct DominanceReport {
  std::pair<double, double> reference_profile;
  // gains[family index 0/1][opponent action]
  std::array<std::array<DisobeyGain, 2>, 2> gains;
  std::array<bool, 2> disobey_dominant{};
  std::vector<std::pair<Action, Action>> pure_nash;  // finite cells only
  // Divergent cells that would satisfy the Nash conditions; reported as
  // "no finite equilibrium".
  std::vector<std::pair<Action, Action>> divergent_candidates;
  std::vector<std::pair<Action, Action>> divergent_cells;
};

// Reference defaults to one simultaneous best-response step from
// (t_obey, t_obey).
std::pair<double, double> default_reference_profile(const TwoFamilySetup& setup);

DominanceReport analyze_dominance(
    const ObeyDisobeyGame& game,
    std::optional<std::pair<double, double>> reference_profile = std::nullopt);

enum class UpdateScheme { Simultaneous, Alternating };
enum class DynamicsStop { RoundsExhausted, Converged, HitCap };

const char* to_string(UpdateScheme s);
const char* to_string(DynamicsStop s);

struct DynamicsTrace {
  // profiles[0] is the starting profile; one entry per update round after.
  std::vector<std::pair<double, double>> profiles;
  DynamicsStop stop = DynamicsStop::RoundsExhausted;
};

// Alternating rounds update family 1 and then family 2 against the new t1.
DynamicsTrace best_response_dynamics(const TwoFamilySetup& setup,
                                     std::pair<double, double> t0, int rounds,
                                     UpdateScheme scheme = UpdateScheme::Simultaneous);

}  // namespace poscomp
