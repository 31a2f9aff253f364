#pragma once

#include <span>

namespace poscomp::stats {

// Left-to-right sums so results are bit-stable for a given input order.
double sum(std::span<const double> xs);
double mean(std::span<const double> xs);
// Population standard deviation (divides by N). Zero for N < 2.
double pstdev(std::span<const double> xs);
// Gini coefficient of xs shifted by their minimum; 0 when all values agree.
double shifted_gini(std::span<const double> xs);

}  // namespace poscomp::stats
