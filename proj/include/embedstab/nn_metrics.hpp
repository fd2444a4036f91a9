#pragma once

#include "embedstab/embedding_space.hpp"
#include "embedstab/run_set.hpp"

#include <span>
#include <string>
#include <vector>

namespace embedstab {

/// Overlap of two top-n neighbor lists of one target.
struct OverlapMeasurement {
  std::string target;
  std::size_t n = 0;
  std::size_t m = 0;  // shared entries
  double p_at_n = 0.0;
  double j_at_n = 0.0;

  /// p = m / n and j = m / (2n - m) from integer counts.
  static OverlapMeasurement from_counts(std::string target, std::size_t n, std::size_t m);
};

/// Overlap of the first n entries of two ranked word lists.
OverlapMeasurement overlap_of_lists(const std::string& target,
                                    std::span<const std::string> ranked_a,
                                    std::span<const std::string> ranked_b, std::size_t n);

/// p@n and j@n between two spaces; neighbor lists range over their joint
/// vocabulary.
OverlapMeasurement p_at_n(const EmbeddingSpace& a, const EmbeddingSpace& b,
                          const std::string& target, std::size_t n);

/// j = p / (2 - p) for p in [0, 1].
double p_to_j(double p);

struct MeanOverlap {
  std::string target;
  std::size_t n = 0;
  double mean_p = 0.0;
  double mean_j = 0.0;
  std::size_t pair_count = 0;
};

/// Per-target mean of p@n and j@n over all C(r, 2) unordered run pairs.
/// Neighbor lists range over the joint vocabulary of the whole run set.
std::vector<MeanOverlap> mean_overlap(const RunSet& runs, const std::vector<std::string>& targets,
                                      std::size_t n);

/// Agreement of two independent run sets: Spearman correlation between their
/// per-target mean p@n vectors.
struct OverlapConsistency {
  double rho_p = 0.0;
  double rho_j = 0.0;
  std::size_t targets = 0;
};

OverlapConsistency overlap_consistency(const RunSet& first, const RunSet& second,
                                       const std::vector<std::string>& targets, std::size_t n);

}  // namespace embedstab
