#include "poscomp/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "poscomp/errors.hpp"

namespace poscomp {

namespace {

constexpr double kGapTolerance = 1e-12;
constexpr double kRepeatTolerance = 1e-9;
constexpr int kOracleGridSteps = 4000;

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

FiniteCell evaluate_profile(const TwoFamilySetup& s, double t1, double t2) {
  const double cut = two_family_threshold(s.fam1.gamma, t1, s.fam2.gamma, t2);
  FiniteCell c;
  c.t1 = t1;
  c.t2 = t2;
  c.u1 = utility(s.fam1, Effort(t1, s.t_hard_cap), cut).utility;
  c.u2 = utility(s.fam2, Effort(t2, s.t_hard_cap), cut).utility;
  return c;
}

double log_argument(const FamilyParams& fam_i, const FamilyParams& fam_j,
                    double t_i, double t_j) {
  const double s_i = fam_i.gamma * t_i;
  return 2.0 + s_i - two_family_threshold(fam_i.gamma, t_i, fam_j.gamma, t_j);
}

}  // namespace

void TwoFamilySetup::validate() const {
  fam1.validate();
  fam2.validate();
  if (!(t_hard_cap > 0.0)) throw InvalidArgument("t_hard_cap must be > 0");
  if (!(t_obey > 0.0) || t_obey > t_hard_cap) {
    throw InvalidArgument("t_obey must lie in (0, t_hard_cap]");
  }
}

const char* to_string(Action a) { return a == Action::Obey ? "obey" : "disobey"; }

const char* to_string(UpdateScheme s) {
  return s == UpdateScheme::Simultaneous ? "simultaneous" : "alternating";
}

const char* to_string(DynamicsStop s) {
  switch (s) {
    case DynamicsStop::RoundsExhausted: return "rounds_exhausted";
    case DynamicsStop::Converged: return "converged";
    case DynamicsStop::HitCap: return "hit_cap";
  }
  return "?";
}

double two_family_threshold(double gamma_i, double t_i, double gamma_j, double t_j) {
  return (gamma_i * t_i + gamma_j * t_j) / 2.0;
}

double marginal_utility_two_family(const FamilyParams& fam_i,
                                   const FamilyParams& fam_j, double t_i,
                                   double t_j) {
  const double x = log_argument(fam_i, fam_j, t_i, t_j);
  if (!(x > 0.0)) {
    throw DomainError("log argument " + fmt_num(x) +
                      " <= 0; the fail-branch derivative is -P");
  }
  return (fam_i.gamma / 2.0) / x - fam_i.p;
}

double curvature_two_family(const FamilyParams& fam_i, const FamilyParams& fam_j,
                            double t_i, double t_j) {
  const double x = log_argument(fam_i, fam_j, t_i, t_j);
  if (!(x > 0.0)) throw DomainError("log argument <= 0");
  const double half = fam_i.gamma / 2.0;
  return -(half * half) / (x * x);
}

double best_response_two_family(const FamilyParams& fam_i, double gamma_j,
                                double t_j, double t_hard_cap) {
  const double t = 1.0 / fam_i.p + (gamma_j * t_j - 4.0) / fam_i.gamma;
  return std::clamp(t, 0.0, t_hard_cap);
}

double best_response_numeric_oracle(const std::function<double(double)>& utility_fn,
                                    double t_hard_cap) {
  const double h = t_hard_cap / kOracleGridSteps;
  double best_t = 0.0;
  double best_u = utility_fn(0.0);
  for (int i = 1; i <= kOracleGridSteps; ++i) {
    const double t = i == kOracleGridSteps ? t_hard_cap : i * h;
    const double u = utility_fn(t);
    if (u > best_u) {
      best_u = u;
      best_t = t;
    }
  }

  // Golden-section polish on the bracketing cells.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0.0, best_t - h);
  double b = std::min(t_hard_cap, best_t + h);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = utility_fn(c);
  double fd = utility_fn(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = utility_fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = utility_fn(d);
    }
  }
  const double polished = (a + b) / 2.0;
  return utility_fn(polished) > best_u ? polished : best_t;
}

double ParametricPayoff::best_response(double t_other) const {
  return best_response_two_family(self, other.gamma, t_other, t_hard_cap);
}

double ParametricPayoff::evaluate(double t_other) const {
  const double t_self = best_response(t_other);
  const double cut = two_family_threshold(self.gamma, t_self, other.gamma, t_other);
  return utility(self, Effort(t_self, t_hard_cap), cut).utility;
}

std::string ParametricPayoff::render() const {
  // P * BR(t) = (P gamma_j / gamma_i) t + (1 - 4 P / gamma_i)
  const double slope = self.p * other.gamma / self.gamma;
  const double intercept = 1.0 - 4.0 * self.p / self.gamma;
  const char* var = self_index == 1 ? "t2" : "t1";
  return "ln(" + fmt_num(self.gamma / (2.0 * self.p)) + ") - (" + fmt_num(slope) +
         "*" + var + (intercept < 0 ? " - " : " + ") + fmt_num(std::abs(intercept)) + ")";
}

std::pair<double, double> ObeyDisobeyGame::payoffs(
    Action a1, Action a2, std::pair<double, double> reference) const {
  const GameCell& cell = at(a1, a2);
  if (const auto* f = std::get_if<FiniteCell>(&cell)) return {f->u1, f->u2};
  const auto& d = std::get<DivergentCell>(cell);
  return {d.u1_of_t2.evaluate(reference.second), d.u2_of_t1.evaluate(reference.first)};
}

double divergence_gap(const TwoFamilySetup& setup) {
  return setup.fam1.gamma / setup.fam1.p + setup.fam2.gamma / setup.fam2.p - 8.0;
}

ObeyDisobeyGame build_obey_disobey_game(const TwoFamilySetup& setup) {
  setup.validate();
  const auto& f1 = setup.fam1;
  const auto& f2 = setup.fam2;
  const double cap = setup.t_hard_cap;
  const double t_obey = setup.t_obey;

  ObeyDisobeyGame game{setup, {}};
  auto& cells = game.cells;
  cells[0][0] = evaluate_profile(setup, t_obey, t_obey);
  cells[1][0] = evaluate_profile(setup, best_response_two_family(f1, f2.gamma, t_obey, cap), t_obey);
  cells[0][1] = evaluate_profile(setup, t_obey, best_response_two_family(f2, f1.gamma, t_obey, cap));

  const double gap = divergence_gap(setup);
  if (std::abs(gap) > kGapTolerance) {
    DivergentCell d;
    d.delta = gap / f1.gamma;
    d.escalation_rate = std::abs(d.delta);
    d.u1_of_t2 = ParametricPayoff{f1, f2, cap, 1};
    d.u2_of_t1 = ParametricPayoff{f2, f1, cap, 2};
    cells[1][1] = d;
  } else {
    // BR1 o BR2 is the identity off the clamps: anchor family 1 at t_obey.
    double t1 = t_obey;
    double t2 = best_response_two_family(f2, f1.gamma, t1, cap);
    for (int i = 0; i < 10000; ++i) {
      const double n1 = best_response_two_family(f1, f2.gamma, t2, cap);
      const double n2 = best_response_two_family(f2, f1.gamma, n1, cap);
      const bool done = std::abs(n1 - t1) < kRepeatTolerance && std::abs(n2 - t2) < kRepeatTolerance;
      t1 = n1;
      t2 = n2;
      if (done) break;
    }
    cells[1][1] = evaluate_profile(setup, t1, t2);
  }
  return game;
}

FirstBest first_best_finite(const ObeyDisobeyGame& game) {
  std::optional<FirstBest> best;
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      const auto* f = std::get_if<FiniteCell>(&game.cells[a1][a2]);
      if (!f) continue;
      const double w = f->u1 + f->u2;
      if (!best || w > best->welfare) {
        best = FirstBest{static_cast<Action>(a1), static_cast<Action>(a2), w};
      }
    }
  }
  // (Obey, Obey) is always finite
  return *best;
}

std::pair<double, double> default_reference_profile(const TwoFamilySetup& setup) {
  return {best_response_two_family(setup.fam1, setup.fam2.gamma, setup.t_obey, setup.t_hard_cap),
          best_response_two_family(setup.fam2, setup.fam1.gamma, setup.t_obey, setup.t_hard_cap)};
}

DominanceReport analyze_dominance(const ObeyDisobeyGame& game,
                                  std::optional<std::pair<double, double>> reference_profile) {
  DominanceReport r;
  r.reference_profile = reference_profile.value_or(default_reference_profile(game.setup));
  const auto ref = r.reference_profile;
  constexpr Action kActions[2] = {Action::Obey, Action::Disobey};

  for (Action opp : kActions) {
    const int o = static_cast<int>(opp);
    auto& g1 = r.gains[0][o];
    g1.opponent = opp;
    g1.u_obey = game.payoffs(Action::Obey, opp, ref).first;
    g1.u_disobey = game.payoffs(Action::Disobey, opp, ref).first;
    g1.strictly_improves = g1.u_disobey > g1.u_obey;

    auto& g2 = r.gains[1][o];
    g2.opponent = opp;
    g2.u_obey = game.payoffs(opp, Action::Obey, ref).second;
    g2.u_disobey = game.payoffs(opp, Action::Disobey, ref).second;
    g2.strictly_improves = g2.u_disobey > g2.u_obey;
  }
  for (int f = 0; f < 2; ++f) {
    r.disobey_dominant[f] = r.gains[f][0].strictly_improves && r.gains[f][1].strictly_improves;
  }

  auto flip = [](Action a) { return a == Action::Obey ? Action::Disobey : Action::Obey; };
  for (Action a1 : kActions) {
    for (Action a2 : kActions) {
      const auto [u1, u2] = game.payoffs(a1, a2, ref);
      const bool nash = u1 >= game.payoffs(flip(a1), a2, ref).first &&
                        u2 >= game.payoffs(a1, flip(a2), ref).second;
      const bool finite = game.is_finite(a1, a2);
      if (!finite) r.divergent_cells.emplace_back(a1, a2);
      if (nash) (finite ? r.pure_nash : r.divergent_candidates).emplace_back(a1, a2);
    }
  }
  return r;
}

DynamicsTrace best_response_dynamics(const TwoFamilySetup& setup,
                                     std::pair<double, double> t0, int rounds,
                                     UpdateScheme scheme) {
  setup.validate();
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  const double cap = setup.t_hard_cap;
  DynamicsTrace trace;
  trace.profiles.push_back(t0);
  auto [t1, t2] = t0;
  for (int r = 0; r < rounds; ++r) {
    double n1 = best_response_two_family(setup.fam1, setup.fam2.gamma, t2, cap);
    double n2 = best_response_two_family(setup.fam2, setup.fam1.gamma,
                                         scheme == UpdateScheme::Simultaneous ? t1 : n1, cap);
    const double change = std::max(std::abs(n1 - t1), std::abs(n2 - t2));
    t1 = n1;
    t2 = n2;
    trace.profiles.emplace_back(t1, t2);
    if (t1 >= cap || t2 >= cap) {
      trace.stop = DynamicsStop::HitCap;
      break;
    }
    if (change < kRepeatTolerance) {
      trace.stop = DynamicsStop::Converged;
      break;
    }
  }
  return trace;
}

}  // namespace poscomp
