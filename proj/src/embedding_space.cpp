#include "embedstab/embedding_space.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace embedstab {

namespace {

std::string line_ref(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

// Strict weak order used for every ranking: cosine descending, then word.
bool ranks_before(double cos_a, const std::string& word_a, double cos_b,
                  const std::string& word_b) {
  if (cos_a != cos_b) return cos_a > cos_b;
  return word_a < word_b;
}

std::vector<Neighbor> top_n(const EmbeddingSpace& space, std::size_t target,
                            std::span<const std::size_t> candidates, std::size_t n) {
  const auto& m = space.matrix();
  const auto t = m.row(static_cast<Eigen::Index>(target));
  const double t_norm = t.norm();
  struct Scored {
    double cos;
    std::size_t idx;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (std::size_t c : candidates) {
    if (c == target) continue;
    const auto r = m.row(static_cast<Eigen::Index>(c));
    scored.push_back({t.dot(r) / (t_norm * r.norm()), c});
  }
  const auto& words = space.vocab().words();
  auto cmp = [&](const Scored& a, const Scored& b) {
    return ranks_before(a.cos, words[a.idx], b.cos, words[b.idx]);
  };
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), cmp);
  std::vector<Neighbor> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({words[scored[i].idx], scored[i].cos});
  return out;
}

}  // namespace

// --- Vocabulary ----------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw DataError("vocabulary contains an empty token");
    if (!index_.emplace(words_[i], i).second)
      throw DataError("duplicate word in vocabulary: '" + words_[i] + "'");
  }
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : Vocabulary(std::move(words)) {
  if (counts.size() != words_.size())
    throw DataError("frequency count list does not match vocabulary size");
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] < 1) throw DataError("word '" + words_[i] + "' has a zero count");
  counts_ = std::move(counts);
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.find(word) != index_.end();
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index_of(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end())
    throw DataError("out-of-vocabulary word: '" + std::string(word) + "'");
  return it->second;
}

Vocabulary Vocabulary::with_frequencies(
    const std::unordered_map<std::string, std::uint64_t>& counts_by_word) const {
  std::vector<std::uint64_t> counts;
  counts.reserve(words_.size());
  for (const auto& w : words_) {
    const auto it = counts_by_word.find(w);
    if (it == counts_by_word.end())
      throw DataError("no frequency entry for word '" + w + "'");
    counts.push_back(it->second);
  }
  return Vocabulary(words_, std::move(counts));
}

// --- EmbeddingSpace ----------------------------------------------------------

EmbeddingSpace::EmbeddingSpace(Vocabulary vocab, Matrix matrix, bool normalized)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), normalized_(normalized) {
  if (static_cast<std::size_t>(matrix_.rows()) != vocab_.size())
    throw DataError("matrix has " + std::to_string(matrix_.rows()) + " rows but vocabulary has " +
                    std::to_string(vocab_.size()) + " words");
  if (matrix_.cols() < 1) throw DataError("embedding dimension must be at least 1");
  if (normalized_) {
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
      if (std::abs(matrix_.row(i).norm() - 1.0) > 1e-9)
        throw DataError("row of '" + vocab_.word(static_cast<std::size_t>(i)) +
                        "' is not unit length in a space flagged normalized");
    }
  }
}

// --- I/O -------------------------------------------------------------------

EmbeddingSpace load_text_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::size_t v = 0;
  long long d = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_ws(line);
    if (fields.size() != 2 || !detail::parse_int(fields[0], v) ||
        !detail::parse_int(fields[1], d) || d < 1)
      throw DataError("malformed header at " + line_ref(path, line_no) +
                      " (expected \"<rows> <dim>\")");
    have_header = true;
    break;
  }
  if (!have_header) throw DataError("missing header in " + path.string());

  std::vector<std::string> words;
  words.reserve(v);
  std::unordered_set<std::string> seen;
  Matrix m(static_cast<Eigen::Index>(v), d);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_ws(line);
    if (row >= v)
      throw DataError("more rows than the header announces at " + line_ref(path, line_no));
    if (static_cast<long long>(fields.size()) != d + 1)
      throw DataError("dimension mismatch at " + line_ref(path, line_no) + ": expected " +
                      std::to_string(d) + " values, found " +
                      std::to_string(fields.empty() ? 0 : fields.size() - 1));
    std::string word(fields[0]);
    if (!seen.insert(word).second)
      throw DataError("duplicate word '" + word + "' at " + line_ref(path, line_no));
    for (long long k = 0; k < d; ++k) {
      double x;
      if (!detail::parse_double(fields[static_cast<std::size_t>(k) + 1], x))
        throw DataError("unparsable number at " + line_ref(path, line_no));
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) = x;
    }
    words.push_back(std::move(word));
    ++row;
  }
  if (row != v)
    throw DataError("header announces " + std::to_string(v) + " rows but " + path.string() +
                    " has " + std::to_string(row));
  return EmbeddingSpace(Vocabulary(std::move(words)), std::move(m), false);
}

void save_text_vectors(const EmbeddingSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write vector file " + path.string());
  std::string buf;
  buf += std::to_string(space.size());
  buf += ' ';
  buf += std::to_string(space.dim());
  buf += '\n';
  const auto& m = space.matrix();
  for (std::size_t i = 0; i < space.size(); ++i) {
    buf += space.vocab().word(i);
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      buf += ' ';
      detail::append_double(buf, m(static_cast<Eigen::Index>(i), k));
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  if (!out) throw DataError("I/O failure while writing " + path.string());
}

std::unordered_map<std::string, std::uint64_t> load_frequencies(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open frequency file " + path.string());
  std::unordered_map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    std::uint64_t c = 0;
    if (tab == std::string::npos || !detail::parse_int(detail::trim(line.substr(tab + 1)), c))
      throw DataError("malformed frequency line at " + line_ref(path, line_no));
    counts[line.substr(0, tab)] = c;
  }
  return counts;
}

void save_frequencies(const Vocabulary& vocab, const std::filesystem::path& path) {
  if (!vocab.has_frequencies()) throw DataError("vocabulary carries no frequencies");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write frequency file " + path.string());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab.word(i) << '\t' << vocab.count(i) << '\n';
}

AnalogyDataset load_analogy_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open analogy dataset " + path.string());
  AnalogyDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ':') continue;
    const auto f = detail::split_ws(t);
    if (f.size() != 4)
      throw DataError("analogy question must have 4 tokens at " + line_ref(path, line_no));
    ds.questions.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]),
                            std::string(f[3])});
  }
  return ds;
}

// --- geometry ----------------------------------------------------------------

EmbeddingSpace normalize(const EmbeddingSpace& space) {
  Matrix m = space.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (n == 0.0 || !std::isfinite(n))
      throw DataError("cannot normalize zero vector of word '" +
                      space.vocab().word(static_cast<std::size_t>(i)) + "'");
    m.row(i) /= n;
  }
  return EmbeddingSpace(space.vocab(), std::move(m), true);
}

double cosine(const EmbeddingSpace& space, std::size_t i, std::size_t j) {
  const auto a = space.row(i);
  const auto b = space.row(j);
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::clamp(c, -1.0, 1.0);
}

double cosine(const EmbeddingSpace& space, std::string_view w1, std::string_view w2) {
  return cosine(space, space.vocab().index_of(w1), space.vocab().index_of(w2));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingSpace& space, std::string_view target,
                                        std::size_t n) {
  const std::size_t t = space.vocab().index_of(target);
  if (n < 1 || n + 1 > space.size())
    throw UsageError("neighbor count " + std::to_string(n) + " out of range for vocabulary of " +
                     std::to_string(space.size()));
  std::vector<std::size_t> all(space.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return top_n(space, t, all, n);
}

std::vector<Neighbor> nearest_neighbors_within(const EmbeddingSpace& space,
                                               std::string_view target, std::size_t n,
                                               const Vocabulary& candidates) {
  const std::size_t t = space.vocab().index_of(target);
  std::vector<std::size_t> idx;
  idx.reserve(candidates.size());
  for (const auto& w : candidates.words()) idx.push_back(space.vocab().index_of(w));
  const std::size_t available = candidates.contains(target) ? idx.size() - 1 : idx.size();
  if (n < 1 || n > available)
    throw UsageError("neighbor count " + std::to_string(n) + " out of range for " +
                     std::to_string(available) + " candidates");
  return top_n(space, t, idx, n);
}

AnalogyResult analogy_score(const EmbeddingSpace& space, const AnalogyDataset& dataset,
                            const std::optional<std::vector<std::string>>& restrict_to_words) {
  AnalogyResult result;
  result.total = dataset.questions.size();
  if (result.total == 0) return result;

  // Evaluation vocabulary as indices into the space, in space order.
  std::vector<std::size_t> eval;
  std::vector<char> in_eval(space.size(), restrict_to_words ? 0 : 1);
  if (restrict_to_words) {
    for (const auto& w : *restrict_to_words)
      if (auto i = space.vocab().find(w)) in_eval[*i] = 1;
  }
  for (std::size_t i = 0; i < space.size(); ++i)
    if (in_eval[i]) eval.push_back(i);

  Matrix unit = space.matrix();
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double n = unit.row(i).norm();
    if (n > 0.0) unit.row(i) /= n;
  }
  const auto& words = space.vocab().words();

  for (const auto& q : dataset.questions) {
    const auto ia = space.vocab().find(q.a), ib = space.vocab().find(q.b),
               ic = space.vocab().find(q.c), id = space.vocab().find(q.d);
    if (!ia || !ib || !ic || !id) continue;
    if (!in_eval[*ia] || !in_eval[*ib] || !in_eval[*ic] || !in_eval[*id]) continue;
    ++result.answered;

    const RowVector query = unit.row(static_cast<Eigen::Index>(*ib)) -
                            unit.row(static_cast<Eigen::Index>(*ia)) +
                            unit.row(static_cast<Eigen::Index>(*ic));
    const double qn = query.norm();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
    for (std::size_t i : eval) {
      if (i == *ia || i == *ib || i == *ic) continue;
      const double c = qn > 0.0 ? query.dot(unit.row(static_cast<Eigen::Index>(i))) / qn : 0.0;
      if (best_idx == std::numeric_limits<std::size_t>::max() ||
          ranks_before(c, words[i], best, words[best_idx])) {
        best = c;
        best_idx = i;
      }
    }
    if (best_idx == *id) ++result.correct;
  }
  result.coverage = static_cast<double>(result.answered) / static_cast<double>(result.total);
  result.accuracy = result.answered == 0 ? 0.0
                                         : static_cast<double>(result.correct) /
                                               static_cast<double>(result.answered);
  return result;
}

namespace {

Vocabulary joint_of(std::span<const Vocabulary* const> vocabs) {
  const Vocabulary& first = *vocabs.front();
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const auto& w = first.word(i);
    const bool everywhere = std::all_of(vocabs.begin() + 1, vocabs.end(),
                                        [&](const Vocabulary* v) { return v->contains(w); });
    if (!everywhere) continue;
    words.push_back(w);
    if (first.has_frequencies()) counts.push_back(first.count(i));
  }
  if (first.has_frequencies()) return Vocabulary(std::move(words), std::move(counts));
  return Vocabulary(std::move(words));
}

}  // namespace

Vocabulary joint_vocabulary(std::span<const EmbeddingSpace> spaces) {
  if (spaces.empty()) throw UsageError("joint vocabulary of zero spaces");
  std::vector<const Vocabulary*> vocabs;
  for (const auto& s : spaces) vocabs.push_back(&s.vocab());
  return joint_of(vocabs);
}

Vocabulary joint_vocabulary(const EmbeddingSpace& a, const EmbeddingSpace& b) {
  const Vocabulary* vocabs[] = {&a.vocab(), &b.vocab()};
  return joint_of(vocabs);
}

EmbeddingSpace restrict_to(const EmbeddingSpace& space, const Vocabulary& vocab) {
  Matrix m(static_cast<Eigen::Index>(vocab.size()), space.dim());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = space.row(space.vocab().index_of(vocab.word(i)));
  if (vocab.has_frequencies() || !space.vocab().has_frequencies())
    return EmbeddingSpace(vocab, std::move(m), space.normalized());
  std::vector<std::uint64_t> counts;
  counts.reserve(vocab.size());
  for (const auto& w : vocab.words()) counts.push_back(space.vocab().count(w));
  return EmbeddingSpace(Vocabulary(vocab.words(), std::move(counts)), std::move(m),
                        space.normalized());
}

EmbeddingSpace transform(const EmbeddingSpace& space, const Matrix& t) {
  if (t.rows() != space.dim() || t.cols() != space.dim())
    throw UsageError("transform must be d x d");
  const bool orthogonal =
      (t * t.transpose() - Matrix::Identity(t.rows(), t.cols())).norm() < 1e-9;
  Matrix m = space.matrix() * t;
  if (space.normalized() && orthogonal) {
    // Re-scale to absorb rounding so the normalized invariant holds exactly.
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).norm();
    return EmbeddingSpace(space.vocab(), std::move(m), true);
  }
  return EmbeddingSpace(space.vocab(), std::move(m), false);
}

}  // namespace embedstab
