#pragma once

#include <map>
#include <string>
#include <vector>

namespace ffgrad {

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;  // after pooling
};

// Goodness of fit of observed counts against cell probabilities. Cells with
// expected count below min_expected are pooled into one cell.
ChiSquareResult chi_square_gof(const std::vector<double>& prob, const std::vector<long>& observed,
                               double min_expected = 5.0);
ChiSquareResult chi_square_independence(const std::vector<std::vector<long>>& table);

// Standardized deviation of a binomial count from its mean.
double binomial_z(long successes, long trials, double p);

struct Summary {
  long n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(const std::vector<double>& xs);

// Counts of each distinct key.
template <class K>
std::map<K, long> histogram(const std::vector<K>& xs) {
  std::map<K, long> h;
  for (const auto& x : xs) ++h[x];
  return h;
}

}  // namespace ffgrad
