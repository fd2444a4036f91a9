#pragma once

#include "embedstab/corpus.hpp"
#include "embedstab/embedding_space.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace embedstab {

/// Spaces from repeated runs of one (technique, corpus, sampling mode)
/// configuration.
struct RunSet {
  std::vector<EmbeddingSpace> spaces;
  SamplingMode mode;
  std::string label;

  std::size_t size() const noexcept { return spaces.size(); }

  /// Throws DataError unless there is at least one space and all share d.
  void validate() const;

  Vocabulary joint_vocabulary() const;
};

/// All unordered index pairs (i < j) of `r` runs, in lexicographic order.
std::vector<std::pair<std::size_t, std::size_t>> run_pairs(std::size_t r);

/// Loads every "*.vec" file of `dir` in file-name order; frequency sidecars
/// "<name>.freq" are attached when present.
RunSet load_run_set(const std::filesystem::path& dir, std::string label = {});

}  // namespace embedstab
