#include "poscomp/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "poscomp/errors.hpp"
#include "poscomp/stats.hpp"

namespace poscomp {

const char* to_string(Rationality r) {
  return r == Rationality::Bounded ? "bounded" : "rational";
}

void FamilyParams::validate() const {
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw InvalidArgument("family '" + id + "': gamma must be > 0");
  }
  if (!(std::isfinite(p) && p > 0.0)) {
    throw InvalidArgument("family '" + id + "': p must be > 0");
  }
}

Effort::Effort(double hours, double cap) : hours_(hours) {
  if (!(hours >= 0.0) || hours > cap) {
    throw InvalidArgument("effort " + std::to_string(hours) + " outside [0, " +
                          std::to_string(cap) + "]");
  }
}

Effort Effort::clamped(double hours, double cap) {
  if (!(hours > 0.0)) return Effort{};
  return Effort(hours > cap ? cap : hours, cap);
}

ThresholdSpec ThresholdSpec::fixed(double s_cut) {
  if (!std::isfinite(s_cut)) throw InvalidArgument("fixed s_cut must be finite");
  return ThresholdSpec(FixedThreshold{s_cut});
}

ThresholdSpec ThresholdSpec::mean_plus_k_sigma(double k) {
  if (!std::isfinite(k)) throw InvalidArgument("k must be finite");
  return ThresholdSpec(MeanPlusKSigma{k});
}

double score(double gamma, Effort t) { return gamma * t.hours(); }

double cost(double p, Effort t) { return p * t.hours(); }

double threshold(std::span<const double> scores, const ThresholdSpec& spec) {
  if (const auto* f = std::get_if<FixedThreshold>(&spec.mode())) return f->s_cut;
  const double k = std::get<MeanPlusKSigma>(spec.mode()).k;
  if (scores.empty()) throw EmptyPopulation();
  const double m = stats::mean(scores);
  if (k == 0.0) return m;
  return m + k * stats::pstdev(scores);
}

double threshold_from_moments(double mean, double sigma, double k) {
  return mean + k * sigma;
}

UtilityOutcome utility(const FamilyParams& fam, Effort t, double s_cut) {
  UtilityOutcome out;
  out.score = score(fam.gamma, t);
  out.cost = cost(fam.p, t);
  out.passed = out.score >= s_cut;
  // log argument is >= 2 on the pass branch
  out.utility = out.passed ? std::log(2.0 + out.score - s_cut) - out.cost : -out.cost;
  return out;
}

double committed_utility(const FamilyParams& fam, double t, double s_cut) {
  const double x = 2.0 + fam.gamma * t - s_cut;
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(x) - fam.p * t;
}

}  // namespace poscomp
