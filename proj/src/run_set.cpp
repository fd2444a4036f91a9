#include "embedstab/run_set.hpp"

#include "embedstab/error.hpp"

#include <algorithm>

namespace embedstab {

void RunSet::validate() const {
  if (spaces.empty()) throw DataError("run set '" + label + "' is empty");
  for (const auto& s : spaces)
    if (s.dim() != spaces.front().dim())
      throw DataError("run set '" + label + "' mixes embedding dimensions");
}

Vocabulary RunSet::joint_vocabulary() const {
  validate();
  return embedstab::joint_vocabulary(std::span<const EmbeddingSpace>(spaces));
}

std::vector<std::pair<std::size_t, std::size_t>> run_pairs(std::size_t r) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (r >= 2) pairs.reserve(r * (r - 1) / 2);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) pairs.emplace_back(i, j);
  return pairs;
}

RunSet load_run_set(const std::filesystem::path& dir, std::string label) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("run directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".vec") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  RunSet rs;
  rs.label = label.empty() ? dir.filename().string() : std::move(label);
  for (const auto& f : files) {
    EmbeddingSpace s = load_text_vectors(f);
    auto freq = f;
    freq.replace_extension(".freq");
    if (std::filesystem::exists(freq))
      s = EmbeddingSpace(s.vocab().with_frequencies(load_frequencies(freq)), s.matrix(),
                         s.normalized());
    rs.spaces.push_back(std::move(s));
  }
  rs.validate();
  return rs;
}

}  // namespace embedstab
