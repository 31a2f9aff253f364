#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// being checked; each routine uses a different numerical method.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace poscomp::oracle {

// Leftmost argmax on a uniform grid with `steps` intervals.
inline double dense_argmax(const std::function<double(double)>& f, double lo, double hi,
                           int steps) {
  double best_t = lo;
  double best = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double t = lo + (hi - lo) * i / steps;
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

// Last sign change of f on a fine scan, refined by the secant/regula-falsi
// method.
inline double last_root(const std::function<double(double)>& f, double lo, double hi,
                        int steps) {
  double a = std::numeric_limits<double>::quiet_NaN(), b = a;
  double prev_t = lo, prev = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double t = lo + (hi - lo) * i / steps;
    const double v = f(t);
    if ((prev > 0.0) != (v > 0.0)) {
      a = prev_t;
      b = t;
    }
    prev_t = t;
    prev = v;
  }
  if (std::isnan(a)) return a;
  double fa = f(a), fb = f(b);
  for (int i = 0; i < 100; ++i) {
    const double c = b - fb * (b - a) / (fb - fa);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
      fb = fc;
    }
    if (std::abs(b - a) < 1e-14) break;
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x,
                                double h = 1e-3) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Two-pass textbook moments, divide by N.
inline double naive_mean(const std::vector<double>& xs) {
  long double s = 0;
  for (double x : xs) s += x;
  return static_cast<double>(s / xs.size());
}

inline double naive_pstdev(const std::vector<double>& xs) {
  const double m = naive_mean(xs);
  long double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(static_cast<double>(s / xs.size()));
}

}  // namespace poscomp::oracle
