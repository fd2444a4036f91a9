#pragma once

#include <span>
#include <vector>

namespace embedstab {

/// Arithmetic mean; 0 for an empty range.
double mean(std::span<const double> xs);
/// Population standard deviation (1/n).
double population_stddev(std::span<const double> xs);
/// Sample standard deviation (1/(n-1)); 0 for fewer than 2 values.
double sample_stddev(std::span<const double> xs);

/// 1-based ranks with ties replaced by their average rank.
std::vector<double> average_ranks(std::span<const double> xs);

double pearson(std::span<const double> xs, std::span<const double> ys);

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
  /// Set when one input is constant; rho is reported as 0 and p as 1.
  bool degenerate = false;
};

/// Spearman's rank correlation with the two-sided t-approximation p-value
/// (n - 2 degrees of freedom). Requires equal lengths >= 3.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

struct ShapiroWilkResult {
  double w = 0.0;
  double p_value = 0.0;
};

/// Shapiro-Wilk normality test (Royston's AS R94), 3 <= n <= 5000.
ShapiroWilkResult shapiro_wilk(std::span<const double> xs);

/// Kolmogorov-Smirnov distance between the empirical CDF of `ps` and U(0, 1).
double ks_distance_uniform(std::span<const double> ps);

double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace embedstab
