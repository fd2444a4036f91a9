#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace embedstab {

// Row-major: almost every access pattern here walks word rows.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Ordered set of unique tokens with optional occurrence counts.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }

  bool contains(std::string_view word) const;
  std::optional<std::size_t> find(std::string_view word) const;
  /// Throws DataError for out-of-vocabulary words.
  std::size_t index_of(std::string_view word) const;

  bool has_frequencies() const noexcept { return !counts_.empty(); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  std::uint64_t count(std::string_view word) const { return counts_.at(index_of(word)); }

  /// Same words, counts taken from `counts_by_word`; every word needs a count >= 1.
  Vocabulary with_frequencies(
      const std::unordered_map<std::string, std::uint64_t>& counts_by_word) const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
  std::vector<std::uint64_t> counts_;
};

/// A vocabulary together with its v x d matrix of row embeddings.
///
/// Immutable once constructed; every operation below returns a new space.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  /// Validates shapes. When `normalized` is true every row must have unit
  /// norm within 1e-9.
  EmbeddingSpace(Vocabulary vocab, Matrix matrix, bool normalized = false);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return vocab_.size(); }
  Eigen::Index dim() const noexcept { return matrix_.cols(); }
  bool normalized() const noexcept { return normalized_; }

  auto row(std::size_t i) const { return matrix_.row(static_cast<Eigen::Index>(i)); }
  auto row(std::string_view word) const { return row(vocab_.index_of(word)); }

 private:
  Vocabulary vocab_;
  Matrix matrix_;
  bool normalized_ = false;
};

struct Neighbor {
  std::string word;
  double cosine = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct AnalogyQuestion {
  std::string a, b, c, d;
};

struct AnalogyDataset {
  std::vector<AnalogyQuestion> questions;
};

struct AnalogyResult {
  double accuracy = 0.0;
  double coverage = 0.0;
  std::size_t correct = 0;
  std::size_t answered = 0;
  std::size_t total = 0;
};

// --- I/O -------------------------------------------------------------------

EmbeddingSpace load_text_vectors(const std::filesystem::path& path);
void save_text_vectors(const EmbeddingSpace& space, const std::filesystem::path& path);

/// Reads "word<TAB>count" lines.
std::unordered_map<std::string, std::uint64_t> load_frequencies(
    const std::filesystem::path& path);
void save_frequencies(const Vocabulary& vocab, const std::filesystem::path& path);

/// Lines "a b c d"; '#' comments and ": section" headers are skipped.
AnalogyDataset load_analogy_dataset(const std::filesystem::path& path);

// --- geometry ----------------------------------------------------------------

/// Unit-norm rows. Throws DataError naming the first zero row.
EmbeddingSpace normalize(const EmbeddingSpace& space);

/// Cosine of two rows, computed with explicit norm division.
double cosine(const EmbeddingSpace& space, std::string_view w1, std::string_view w2);
double cosine(const EmbeddingSpace& space, std::size_t i, std::size_t j);

/// Top-n words by cosine to `target` (target excluded), descending; ties go
/// to the lexicographically smaller word.
std::vector<Neighbor> nearest_neighbors(const EmbeddingSpace& space,
                                        std::string_view target, std::size_t n);

/// Like nearest_neighbors but candidates are restricted to `candidates`.
std::vector<Neighbor> nearest_neighbors_within(const EmbeddingSpace& space,
                                               std::string_view target, std::size_t n,
                                               const Vocabulary& candidates);

/// 3CosAdd analogy accuracy. With `restrict_to`, the evaluation vocabulary
/// is the intersection of the space vocabulary with that list.
AnalogyResult analogy_score(const EmbeddingSpace& space, const AnalogyDataset& dataset,
                            const std::optional<std::vector<std::string>>& restrict_to = {});

/// Intersection of all vocabularies in the order of the first.
Vocabulary joint_vocabulary(std::span<const EmbeddingSpace> spaces);
Vocabulary joint_vocabulary(const EmbeddingSpace& a, const EmbeddingSpace& b);

/// Rows of `space` for the words of `vocab`, in that order. Frequencies of
/// `vocab` are kept when present, otherwise those of `space`.
EmbeddingSpace restrict_to(const EmbeddingSpace& space, const Vocabulary& vocab);

/// V * transform; the normalized flag survives only for orthogonal transforms
/// (checked to 1e-9).
EmbeddingSpace transform(const EmbeddingSpace& space, const Matrix& transform);

}  // namespace embedstab
