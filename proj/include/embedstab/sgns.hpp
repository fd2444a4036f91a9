#pragma once

#include "embedstab/corpus.hpp"
#include "embedstab/embedding_space.hpp"
#include "embedstab/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace embedstab {

struct SgnsConfig {
  int dim = 300;
  int window = 5;        // context words on each side
  int negatives = 5;     // k
  int epochs = 5;
  double initial_lr = 0.025;
  double subsample_t = 1e-5;
  std::uint64_t min_count = 5;
  std::uint64_t seed = 1;
  bool dynamic_window = true;  // effective window drawn uniformly from [1, window]
  int threads = 1;             // > 1 enables lock-free (nondeterministic) updates

  /// Throws UsageError on an invalid configuration.
  void validate() const;
};

/// Cumulative noise distribution P_n(w) ~ count(w)^(3/4).
class NoiseTable {
 public:
  NoiseTable() = default;
  explicit NoiseTable(const std::vector<double>& probabilities);

  std::size_t sample(Rng& rng) const;
  const std::vector<double>& cdf() const noexcept { return cdf_; }
  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

struct TrainingState {
  Matrix input;   // v_i, one row per word
  Matrix output;  // v_o
  NoiseTable noise;
};

/// Words with count >= min_count ordered by descending count, then
/// lexicographically; counts attached.
Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count);

/// 1 - sqrt(t / f), clamped to 0 for f <= t.
double subsample_probability(double relative_frequency, double t);

/// Unigram^(3/4) distribution over `vocab` (requires frequencies).
std::vector<double> noise_distribution(const Vocabulary& vocab);

double sigmoid(double x);

/// Objective  log s(u_c . v_t) + sum_n log s(-u_n . v_t)  at the current state.
double sgns_objective(const TrainingState& state, std::size_t target, std::size_t context,
                      std::span<const std::size_t> negatives);

/// One gradient-ascent step on sgns_objective with explicitly given noise
/// words. All gradients are taken at the pre-step parameters.
void sgns_step(TrainingState& state, std::size_t target, std::size_t context,
               std::span<const std::size_t> negatives, double lr);

/// Draws k noise words from state.noise (a draw equal to `context` is redrawn
/// once, then accepted) and applies the explicit step.
void sgns_step(TrainingState& state, std::size_t target, std::size_t context, double lr,
               int k, Rng& rng);

/// Initial state for `vocab`: input rows uniform in [-0.5/d, 0.5/d], output zero.
TrainingState init_state(const Vocabulary& vocab, int dim, Rng& rng);

/// Skip-gram with negative sampling. Returns the input vectors.
EmbeddingSpace train(const Corpus& corpus, const SgnsConfig& config);

}  // namespace embedstab
