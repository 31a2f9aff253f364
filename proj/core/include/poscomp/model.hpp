#pragma once

#include <span>
#include <string>
#include <variant>

namespace poscomp {

inline constexpr double kDefaultHardCap = 24.0;

enum class Rationality { Bounded, Rational };

const char* to_string(Rationality r);

// One competing family: aptitude (score per hour of study) and the
// utility lost per hour of study.
struct FamilyParams {
  std::string id;
  double gamma = 1.0;
  double p = 1.0;
  Rationality rationality = Rationality::Bounded;

  // Throws InvalidArgument unless gamma > 0 and p > 0 (both finite).
  void validate() const;
};

// Daily study time in hours, 0 <= t <= cap.
class Effort {
 public:
  constexpr Effort() = default;
  explicit Effort(double hours, double cap = kDefaultHardCap);

  double hours() const { return hours_; }

  // Clamps instead of throwing; NaN maps to 0.
  static Effort clamped(double hours, double cap = kDefaultHardCap);

  friend bool operator==(const Effort&, const Effort&) = default;

 private:
  double hours_ = 0.0;
};

struct FixedThreshold {
  double s_cut = 0.0;
};

struct MeanPlusKSigma {
  double k = 0.0;
};

// How the positional cut-off is formed from a score population.
class ThresholdSpec {
 public:
  using Mode = std::variant<FixedThreshold, MeanPlusKSigma>;

  static ThresholdSpec fixed(double s_cut);
  static ThresholdSpec mean_plus_k_sigma(double k);

  const Mode& mode() const { return mode_; }
  bool is_fixed() const { return std::holds_alternative<FixedThreshold>(mode_); }

 private:
  explicit ThresholdSpec(Mode m) : mode_(m) {}
  Mode mode_;
};

struct UtilityOutcome {
  double score = 0.0;
  double cost = 0.0;
  double utility = 0.0;
  bool passed = false;
};

double score(double gamma, Effort t);
double cost(double p, Effort t);

// mean(scores) + k * population stdev(scores), or the fixed cut.
// Throws EmptyPopulation for an empty pool in mean + k*sigma mode.
double threshold(std::span<const double> scores, const ThresholdSpec& spec);

// Same cut computed from already-known population moments.
double threshold_from_moments(double mean, double sigma, double k);

// Piecewise utility: ln(2 + S - S_cut) - C when S >= S_cut, else -C.
UtilityOutcome utility(const FamilyParams& fam, Effort t, double s_cut);

// The branch a committed family optimizes: ln(2 + S - S_cut) - C for any
// score, -infinity where the log argument is not positive.
double committed_utility(const FamilyParams& fam, double t, double s_cut);

}  // namespace poscomp
