#include "ffgrad/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ffgrad {

namespace {

double upper_tail(double x, int dof) {
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

}  // namespace

ChiSquareResult chi_square_gof(const std::vector<double>& prob, const std::vector<long>& observed,
                               double min_expected) {
  if (prob.size() != observed.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), 0L));
  std::vector<std::pair<double, double>> cells;  // expected, observed
  double pool_e = 0.0, pool_o = 0.0;
  for (size_t i = 0; i < prob.size(); ++i) {
    double e = prob[i] * n;
    if (e < min_expected) {
      pool_e += e;
      pool_o += static_cast<double>(observed[i]);
    } else {
      cells.emplace_back(e, static_cast<double>(observed[i]));
    }
  }
  if (pool_e > 0.0 || pool_o > 0.0) {
    if (pool_e < min_expected && !cells.empty()) {
      auto smallest = std::min_element(cells.begin(), cells.end());
      smallest->first += pool_e;
      smallest->second += pool_o;
    } else {
      cells.emplace_back(pool_e, pool_o);
    }
  }
  ChiSquareResult r;
  r.cells = static_cast<int>(cells.size());
  for (const auto& [e, o] : cells) {
    if (e <= 0.0) {
      if (o > 0.0) r.statistic = INFINITY;
      continue;
    }
    r.statistic += (o - e) * (o - e) / e;
  }
  r.dof = r.cells - 1;
  r.p_value = std::isinf(r.statistic) ? 0.0 : upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<long>>& table) {
  const size_t rows = table.size();
  if (rows == 0) throw std::invalid_argument("chi_square_independence: empty table");
  const size_t cols = table[0].size();
  std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
  double n = 0.0;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      rs[i] += table[i][j];
      cs[j] += table[i][j];
      n += table[i][j];
    }
  ChiSquareResult r;
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) {
      double e = rs[i] * cs[j] / n;
      if (e > 0.0) r.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  r.cells = static_cast<int>(rows * cols);
  r.dof = static_cast<int>((rows - 1) * (cols - 1));
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

double binomial_z(long successes, long trials, double p) {
  double sd = std::sqrt(p * (1.0 - p) * static_cast<double>(trials));
  double dev = static_cast<double>(successes) - p * static_cast<double>(trials);
  if (sd == 0.0) return dev == 0.0 ? 0.0 : INFINITY;
  return dev / sd;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(s.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
  s.stddev = std::sqrt(s.variance);
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace ffgrad
