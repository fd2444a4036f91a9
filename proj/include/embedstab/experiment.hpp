#pragma once

#include "embedstab/corpus.hpp"
#include "embedstab/sgns.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace embedstab {

struct ExperimentConfig {
  std::filesystem::path corpus;
  SamplingKind sampling = SamplingKind::shuffled;
  std::size_t runs = 1;
  SgnsConfig trainer;
  bool lowercase = false;
  bool dedup = false;
  std::filesystem::path out_dir;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Applies one key (corpus, sampling, runs, dim, window, negatives, epochs,
/// lr, subsample, min_count, threads, dynamic_window, lowercase, dedup, out,
/// seed) to `config`. Unknown keys are usage errors.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

struct RunArtifact {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::filesystem::path vectors;
  std::filesystem::path frequencies;
  std::string sha256;
};

/// Trains config.runs spaces, run i using seed config.seed + i for both the
/// corpus sampling and the trainer. Writes run_NNN.vec / run_NNN.freq and
/// manifest.json into config.out_dir.
std::vector<RunArtifact> run_experiment(const ExperimentConfig& config);

}  // namespace embedstab
