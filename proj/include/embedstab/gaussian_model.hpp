#pragma once

#include "embedstab/run_set.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace embedstab {

/// Gaussian parameters of cos(target, query) across runs.
struct PairStatistics {
  std::string target;
  std::string query;
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t r = 0;
};

/// Pair statistics of one target against every word of a query vocabulary.
struct StabilityProfile {
  std::string target;
  std::vector<PairStatistics> entries;

  const PairStatistics* find(const std::string& query) const;
  /// Mean of all entry sigmas.
  double mean_sigma() const;
};

enum class SigmaEstimator {
  maximum_likelihood,  // 1/r
  unbiased,            // 1/(r-1)
};

/// mu and sigma of a sample of cosines.
PairStatistics pair_stats_from_samples(std::string target, std::string query,
                                       std::span<const double> cosines,
                                       SigmaEstimator estimator = SigmaEstimator::maximum_likelihood);

PairStatistics estimate_pair_stats(const RunSet& runs, const std::string& target,
                                   const std::string& query,
                                   SigmaEstimator estimator = SigmaEstimator::maximum_likelihood);

/// Profile of `target` over `queries` (default: joint vocabulary of the runs).
/// The target itself is never a query.
StabilityProfile estimate_profile(const RunSet& runs, const std::string& target,
                                  const std::optional<std::vector<std::string>>& queries = {},
                                  SigmaEstimator estimator = SigmaEstimator::maximum_likelihood);

/// Argument of the error function in prob_greater:
/// (mu_a - mu_b) / sqrt(2 (sigma_a^2 + sigma_b^2)).
double prob_greater_argument(const PairStatistics& a, const PairStatistics& b);

/// P[cos_a > cos_b] for independent Gaussians. Both sigmas zero: 1, 0, or
/// 0.5 for equal means.
double prob_greater(const PairStatistics& a, const PairStatistics& b);

struct PredictionOptions {
  double pruning_threshold = 1e-5;
  double tolerance = 1e-6;     // absolute quadrature tolerance
  double width = 8.0;          // integration half-width in units of the query sigma
};

/// Entries kept for a top-n prediction: those whose prob_greater against the
/// entry with the n-th largest mean reaches the pruning threshold.
std::vector<std::size_t> relevant_entries(const StabilityProfile& profile, int n,
                                          const PredictionOptions& options = {});

/// Probability that `query` is the nearest neighbor of the profile target in
/// a randomly sampled run. Pruned queries get 0.
double predict_p_hash1(const StabilityProfile& profile, const std::string& query,
                       const PredictionOptions& options = {});

/// Probability that `query` is one of the two nearest neighbors.
double predict_p_hash2(const StabilityProfile& profile, const std::string& query,
                       const PredictionOptions& options = {});

/// Expected p@n for n in {1, 2}: (1/n) * sum_s p#n(s)^2.
double expected_overlap(const StabilityProfile& profile, int n,
                        const PredictionOptions& options = {});

/// expected_overlap with every sigma replaced by `gamma` (default: the
/// profile's mean sigma).
double structure_factor(const StabilityProfile& profile, int n,
                        std::optional<double> gamma = std::nullopt,
                        const PredictionOptions& options = {});

/// TSV "target query mu sigma r" with a header row.
void save_profiles(std::span<const StabilityProfile> profiles, const std::filesystem::path& path);
std::vector<StabilityProfile> load_profiles(const std::filesystem::path& path);

}  // namespace embedstab
