#pragma once

#include "embedstab/embedding_space.hpp"
#include "embedstab/run_set.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace embedstab {

struct AlignmentResult {
  Matrix rotation;        // d x d orthogonal, maps the first space onto the second
  double residual = 0.0;  // ||V_a A - V_b||_F over the joint rows
  Vocabulary joint_vocab;
};

/// Orthogonal Procrustes: A = U W^T from the SVD U S W^T of V_a^T V_b over
/// the joint vocabulary. Reflections are allowed.
AlignmentResult procrustes(const EmbeddingSpace& a, const EmbeddingSpace& b);

/// M = (V_a A + V_b) / 2 on joint words, unnormalized. Words of only one
/// space keep their row (rotated when they come from `a`). Word order: all of
/// `b`, then the words only in `a`. Inputs must be flagged normalized.
EmbeddingSpace aligned_average_pair(const EmbeddingSpace& a, const EmbeddingSpace& b);

enum class Pairing { given, seeded };

struct TreeOptions {
  bool renormalize = true;  // rescale every intermediate average to unit rows
  Pairing pairing = Pairing::given;
  std::uint64_t seed = 0;   // used with Pairing::seeded
};

/// Binary-tree averaging: adjacent spaces are averaged level by level, an odd
/// space is carried up unchanged. With renormalization the result has unit
/// rows (zero rows are dropped and reported through `dropped`).
EmbeddingSpace aligned_average_tree(std::span<const EmbeddingSpace> spaces,
                                    const TreeOptions& options = {},
                                    std::vector<std::string>* dropped = nullptr);

/// Unit rows; zero rows are removed and their words appended to `dropped`.
EmbeddingSpace renormalize_dropping_zero(const EmbeddingSpace& space,
                                         std::vector<std::string>* dropped = nullptr);

using WordPair = std::pair<std::string, std::string>;

/// `count` distinct-word pairs drawn uniformly (with replacement across pairs).
std::vector<WordPair> sample_word_pairs(const Vocabulary& vocab, std::size_t count,
                                        std::uint64_t seed);

struct BiasVarianceReport {
  double sigma_original = 0.0;  // mean over pairs of the across-run cosine std
  double sigma_averaged = 0.0;
  double mu_original = 0.0;     // mean over pairs of the across-run mean cosine
  double mu_averaged = 0.0;
  double sigma_ratio = 0.0;     // averaged / original
  double mu_ratio = 0.0;
  std::size_t pairs = 0;
};

BiasVarianceReport bias_variance_report(const RunSet& runs, const RunSet& averaged,
                                        const std::vector<WordPair>& word_pairs);

}  // namespace embedstab
