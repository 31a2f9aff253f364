#include "poscomp/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poscomp/errors.hpp"
#include "poscomp/rng.hpp"
#include "poscomp/stats.hpp"

namespace poscomp {

namespace {

constexpr double kConvergenceTolerance = 1e-9;
constexpr int kMaxRejections = 100000;

enum Stream : std::uint64_t { kGammaStream = 0, kPStream = 1 };

void validate_distribution(const Distribution& d, int n, const char* what) {
  const std::string name = what;
  std::visit(
      [&](const auto& dist) {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          if (!(dist.lo > 0.0) || !(dist.hi >= dist.lo) || !std::isfinite(dist.hi)) {
            throw InvalidArgument(name + ": uniform needs 0 < lo <= hi");
          }
        } else if constexpr (std::is_same_v<T, NormalDist>) {
          if (!(dist.sd >= 0.0) || !(dist.min > 0.0) || !std::isfinite(dist.mean)) {
            throw InvalidArgument(name + ": normal needs sd >= 0 and min > 0");
          }
          if (dist.sd == 0.0 && dist.mean < dist.min) {
            throw InvalidArgument(name + ": degenerate normal below its truncation point");
          }
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          if (!(dist.sigma >= 0.0) || !std::isfinite(dist.mu)) {
            throw InvalidArgument(name + ": lognormal needs sigma >= 0");
          }
        } else {
          const auto sz = dist.values.size();
          if (sz != 1 && sz != static_cast<std::size_t>(n)) {
            throw InvalidArgument(name + ": explicit list needs 1 or n values");
          }
          for (double v : dist.values) {
            if (!(std::isfinite(v) && v > 0.0)) {
              throw InvalidArgument(name + ": explicit values must be > 0");
            }
          }
        }
      },
      d);
}

double draw(const Distribution& d, RandomStream& rs, std::size_t index) {
  return std::visit(
      [&](const auto& dist) -> double {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, UniformDist>) {
          return rs.uniform(dist.lo, dist.hi);
        } else if constexpr (std::is_same_v<T, NormalDist>) {
          for (int i = 0; i < kMaxRejections; ++i) {
            const double v = rs.normal(dist.mean, dist.sd);
            if (v >= dist.min) return v;
          }
          throw InvalidArgument("truncated normal rejected too many draws");
        } else if constexpr (std::is_same_v<T, LogNormalDist>) {
          return std::exp(rs.normal(dist.mu, dist.sigma));
        } else {
          return dist.values.size() == 1 ? dist.values[0] : dist.values[index];
        }
      },
      d);
}

struct Decision {
  double t = 0.0;
  bool quit = false;
};

Decision decide(const FamilyParams& fam, double s_cut, double quit_payoff, double cap) {
  const double t = best_response_population(fam, s_cut, cap);
  if (fam.rationality == Rationality::Bounded) return {t, false};
  if (utility(fam, Effort(t, cap), s_cut).utility < quit_payoff) return {0.0, true};
  return {t, false};
}

void fill_aggregates(RoundRecord& rec, std::span<const FamilyParams> families) {
  const double n = static_cast<double>(families.size());
  rec.mean_t = stats::mean(rec.efforts);
  rec.welfare_total = stats::sum(rec.utilities);
  rec.welfare_mean = rec.welfare_total / n;
  rec.n_active = 0;
  rec.n_exhausted = 0;
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (!rec.active[i]) continue;
    ++rec.n_active;
    if (rec.utilities[i] < 0.0) ++rec.n_exhausted;
  }
}

}  // namespace

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::MaxRounds: return "max_rounds";
    case SimStatus::Converged: return "converged";
    case SimStatus::Diverged: return "diverged";
    case SimStatus::EmptyPopulation: return "empty_population";
  }
  return "?";
}

void PopulationSpec::validate() const {
  if (n < 2) throw InvalidArgument("population n must be >= 2");
  validate_distribution(gamma_dist, n, "gamma");
  validate_distribution(p_dist, n, "p");
}

std::vector<FamilyParams> sample_population(const PopulationSpec& spec) {
  spec.validate();
  std::vector<FamilyParams> out;
  out.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    auto gs = RandomStream::for_family(spec.seed, idx, kGammaStream);
    auto ps = RandomStream::for_family(spec.seed, idx, kPStream);
    FamilyParams f;
    f.id = "f" + std::to_string(i);
    f.gamma = draw(spec.gamma_dist, gs, idx);
    f.p = draw(spec.p_dist, ps, idx);
    f.rationality = spec.rationality;
    f.validate();
    out.push_back(std::move(f));
  }
  return out;
}

void SimConfig::validate() const {
  if (rounds_max < 1) throw InvalidArgument("rounds_max must be >= 1");
  if (!(t_hard_cap > 0.0)) throw InvalidArgument("t_hard_cap must be > 0");
  if (!(initial_effort >= 0.0) || initial_effort > t_hard_cap) {
    throw InvalidArgument("initial_effort must lie in [0, t_hard_cap]");
  }
  for (double t : initial_efforts) {
    if (!(t >= 0.0) || t > t_hard_cap) {
      throw InvalidArgument("initial_efforts must lie in [0, t_hard_cap]");
    }
  }
  if (!std::isfinite(quit_payoff)) throw InvalidArgument("quit_payoff must be finite");
  if (!(divergence_cap > 0.0)) throw InvalidArgument("divergence_cap must be > 0");
}

double best_response_population(const FamilyParams& fam, double s_cut, double t_hard_cap) {
  return std::clamp(1.0 / fam.p + (s_cut - 2.0) / fam.gamma, 0.0, t_hard_cap);
}

double max_noncompetitive_time(const FamilyParams& fam, double t_hard_cap) {
  fam.validate();
  auto f = [&](double t) { return std::log(2.0 + fam.gamma * t) - fam.p * t; };
  double lo = std::clamp(1.0 / fam.p - 2.0 / fam.gamma, 0.0, t_hard_cap);
  double hi = t_hard_cap;
  if (f(hi) >= 0.0) return t_hard_cap;
  // f(lo) >= ln 2 > 0 at the uncontested optimum
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double decide_effort(const FamilyParams& fam, double s_cut, double quit_payoff,
                     double t_hard_cap) {
  return decide(fam, s_cut, quit_payoff, t_hard_cap).t;
}

SimTrace simulate_feedback(std::span<const FamilyParams> families, const SimConfig& cfg) {
  cfg.validate();
  if (families.empty()) throw InvalidArgument("simulation needs at least one family");
  for (const auto& f : families) f.validate();
  const std::size_t n = families.size();
  if (!cfg.initial_efforts.empty() && cfg.initial_efforts.size() != n) {
    throw InvalidArgument("initial_efforts must have one entry per family");
  }
  const double cap = cfg.t_hard_cap;

  SimTrace trace;
  trace.families.assign(families.begin(), families.end());

  RoundRecord r0;
  r0.round = 0;
  r0.efforts.resize(n);
  r0.scores.resize(n);
  r0.utilities.resize(n);
  r0.active.assign(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    r0.efforts[i] = cfg.initial_efforts.empty() ? cfg.initial_effort : cfg.initial_efforts[i];
    r0.scores[i] = score(families[i].gamma, Effort(r0.efforts[i], cap));
  }
  r0.s_cut = threshold(r0.scores, cfg.threshold);
  r0.s_cut_faced = r0.s_cut;
  r0.sigma_s = stats::pstdev(r0.scores);
  for (std::size_t i = 0; i < n; ++i) {
    r0.utilities[i] = utility(families[i], Effort(r0.efforts[i], cap), r0.s_cut).utility;
  }
  fill_aggregates(r0, families);
  trace.rounds.push_back(std::move(r0));

  trace.status = SimStatus::MaxRounds;
  std::vector<double> pool;
  pool.reserve(n);
  for (int r = 1; r <= cfg.rounds_max; ++r) {
    const RoundRecord& prev = trace.rounds.back();
    RoundRecord rec;
    rec.round = r;
    rec.s_cut_faced = prev.s_cut;
    rec.efforts.assign(n, 0.0);
    rec.scores.assign(n, 0.0);
    rec.utilities.assign(n, cfg.quit_payoff);
    rec.active.assign(n, false);
    pool.clear();

    for (std::size_t i = 0; i < n; ++i) {
      if (!prev.active[i]) {
        if (cfg.quitters_in_pool) pool.push_back(0.0);
        continue;
      }
      const Decision d = decide(families[i], prev.s_cut, cfg.quit_payoff, cap);
      if (d.quit) {
        if (cfg.quitters_in_pool) pool.push_back(0.0);
        continue;
      }
      const Effort t(d.t, cap);
      rec.active[i] = true;
      rec.efforts[i] = d.t;
      rec.scores[i] = score(families[i].gamma, t);
      rec.utilities[i] = utility(families[i], t, prev.s_cut).utility;
      pool.push_back(rec.scores[i]);
    }

    if (pool.empty() && !cfg.threshold.is_fixed()) {
      rec.s_cut = prev.s_cut;
      rec.sigma_s = 0.0;
      fill_aggregates(rec, families);
      trace.rounds.push_back(std::move(rec));
      trace.status = SimStatus::EmptyPopulation;
      break;
    }
    rec.s_cut = threshold(pool, cfg.threshold);
    rec.sigma_s = stats::pstdev(pool);
    fill_aggregates(rec, families);

    double max_change = 0.0;
    bool all_capped = rec.n_active > 0;
    for (std::size_t i = 0; i < n; ++i) {
      max_change = std::max(max_change, std::abs(rec.efforts[i] - prev.efforts[i]));
      if (rec.active[i] && rec.efforts[i] < cap) all_capped = false;
    }
    const bool diverged = rec.s_cut > cfg.divergence_cap || all_capped;
    trace.rounds.push_back(std::move(rec));
    if (diverged) {
      trace.status = SimStatus::Diverged;
      break;
    }
    if (max_change < kConvergenceTolerance) {
      trace.status = SimStatus::Converged;
      break;
    }
  }
  return trace;
}

SimTrace simulate_feedback(const PopulationSpec& pop, const SimConfig& cfg) {
  const auto families = sample_population(pop);
  return simulate_feedback(families, cfg);
}

WelfareSummary welfare_report(const SimTrace& trace) {
  if (trace.rounds.empty()) throw InvalidArgument("empty trace");
  WelfareSummary s;
  s.status = trace.status;
  for (const auto& r : trace.rounds) {
    s.per_round.push_back({r.round, r.s_cut, r.mean_t, r.welfare_total, r.welfare_mean});
    s.s_cut_path.push_back(r.s_cut);
  }
  const auto& last = trace.rounds.back();
  const double n = static_cast<double>(last.efforts.size());
  s.total_utility = last.welfare_total;
  s.mean_utility = last.welfare_mean;
  s.mean_effort = last.mean_t;
  s.exhausted_fraction = last.n_exhausted / n;
  s.quit_fraction = (n - last.n_active) / n;
  return s;
}

}  // namespace poscomp
