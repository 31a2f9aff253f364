#include "poscomp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace poscomp::stats {

double sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return sum(xs) / static_cast<double>(xs.size());
}

double pstdev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

double shifted_gini(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  for (double& x : v) x -= lo;
  const double total = sum(v);
  if (total <= 0.0) return 0.0;
  // G = sum_i (2i - n - 1) x_(i) / (n * sum x), i = 1..n on sorted data
  const double n = static_cast<double>(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * v[i];
  }
  return std::clamp(acc / (n * total), 0.0, 1.0);
}

}  // namespace poscomp::stats
