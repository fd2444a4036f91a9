#pragma once

#include "embedstab/align_average.hpp"
#include "embedstab/corpus.hpp"
#include "embedstab/embedding_space.hpp"
#include "embedstab/sgns.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace embedstab {

/// Delta = 1 - cos(v_t1(w) A, v_t2(w)), with A mapping t1 onto t2.
double semantic_change(const std::string& word, const EmbeddingSpace& t1,
                       const EmbeddingSpace& t2, const AlignmentResult& alignment);

/// Delta of every joint word.
std::map<std::string, double> all_changes(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                                          const AlignmentResult& alignment);

enum class ChangeLabel { unchanged = 0, changed = 1 };

struct Classification {
  double tau = 0.0;      // mu + sigma / 2
  double mu = 0.0;
  double sigma = 0.0;    // population std over the scored vocabulary
  std::map<std::string, ChangeLabel> labels;
};

/// tau from the Deltas of `scored_vocab`; targets are changed iff Delta > tau.
Classification classify_targets(const std::map<std::string, double>& deltas,
                                const std::vector<std::string>& scored_vocab,
                                const std::vector<std::string>& targets);

struct RankedWord {
  std::string word;
  double delta = 0.0;
};

struct ChangeReport {
  std::vector<RankedWord> ranking;  // targets by Delta descending
  Classification classification;
  std::vector<std::string> scored_vocab;
  double residual = 0.0;            // alignment residual
};

/// Joint words whose count in both epochs reaches `min_count`; without
/// frequencies every joint word qualifies.
std::vector<std::string> scored_vocabulary(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                                           std::uint64_t min_count);

/// Aligns t1 onto t2 (normalizing both first) and scores `targets`.
ChangeReport detect_change(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                           const std::vector<std::string>& targets, std::uint64_t min_count);

struct GoldData {
  std::map<std::string, int> binary;
  std::map<std::string, double> graded;
};

/// "word<TAB>0|1" and "word<TAB>score" files; either path may be empty.
GoldData load_gold(const std::filesystem::path& binary, const std::filesystem::path& graded);

struct Evaluation {
  std::optional<double> accuracy;
  std::size_t binary_targets = 0;
  std::optional<double> rho;
  std::optional<double> rho_p_value;
  std::size_t graded_targets = 0;
};

/// Throws DataError listing every gold target missing from the report.
Evaluation evaluate(const ChangeReport& report, const GoldData& gold);

/// Shared-task answer files: binary "word<TAB>0|1" and graded "word<TAB>Delta".
void write_answers(const ChangeReport& report, const std::filesystem::path& binary_path,
                   const std::filesystem::path& graded_path);

struct ChangeObservation {
  std::string word;
  std::size_t epoch_pair = 0;
  double delta = 0.0;
  double frequency = 0.0;
};

struct FrequencyEffectResult {
  double beta_f = 0.0;
  double beta_0 = 0.0;
  double beta_f_se = 0.0;
  double sigma_z2 = 0.0;   // random-intercept variance
  double sigma_e2 = 0.0;   // residual variance
  double var_explained = 0.0;
  std::size_t n_observations = 0;
  std::size_t n_words = 0;
  std::string fit_method = "profiled-ml";
};

/// y = b0 + bf x + z(group) + e with one random intercept per group, fitted by
/// maximum likelihood profiled over lambda = sigma_z^2 / sigma_e^2. Inputs are
/// used as given.
FrequencyEffectResult fit_random_intercept(std::span<const std::size_t> group,
                                           std::span<const double> y, std::span<const double> x);

/// Observations for consecutive epoch pairs (e, e + 1): every joint word
/// counted at least `min_count` times in both epochs gets its Delta and its
/// mean relative frequency over the two epochs. Spaces need frequencies.
std::vector<ChangeObservation> change_observations(std::span<const EmbeddingSpace> epochs,
                                                   std::uint64_t min_count);

/// Log-transforms and standardizes Delta and frequency, then fits the
/// random-intercept model with one group per word.
FrequencyEffectResult frequency_effect(const std::vector<ChangeObservation>& observations);

/// Pools every document, shuffles with `seed`, and deals them into `batches`
/// corpora whose sizes differ by at most one document.
std::vector<Corpus> control_condition(std::span<const Corpus> corpora, std::size_t batches,
                                      std::uint64_t seed);

struct ConformityConfig {
  SgnsConfig trainer;
  std::size_t fold = 1;            // runs averaged per epoch
  std::uint64_t min_count = 500;   // per-epoch count needed to be scored
  std::uint64_t seed = 1;
};

/// One space per epoch: `fold` runs on shuffled copies of the epoch corpus,
/// tree-averaged. Run k of epoch e uses seed derive_seed(seed, e * fold + k).
std::vector<EmbeddingSpace> train_epoch_spaces(std::span<const Corpus> epochs,
                                               const ConformityConfig& config);

/// train_epoch_spaces, change_observations, then frequency_effect.
FrequencyEffectResult conformity_condition(std::span<const Corpus> epochs,
                                           const ConformityConfig& config);

}  // namespace embedstab
