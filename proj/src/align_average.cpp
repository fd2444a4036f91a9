#include "embedstab/align_average.hpp"

#include "embedstab/error.hpp"
#include "embedstab/rng.hpp"
#include "embedstab/stats.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numeric>

namespace embedstab {

namespace {

Matrix joint_rows(const EmbeddingSpace& s, const Vocabulary& joint) {
  Matrix m(static_cast<Eigen::Index>(joint.size()), s.dim());
  for (std::size_t i = 0; i < joint.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = s.row(s.vocab().index_of(joint.word(i)));
  return m;
}

EmbeddingSpace average_unchecked(const EmbeddingSpace& a, const EmbeddingSpace& b) {
  const AlignmentResult al = procrustes(a, b);
  const Vocabulary& va = a.vocab();
  const Vocabulary& vb = b.vocab();
  const bool counts = va.has_frequencies() && vb.has_frequencies();

  std::vector<std::string> words = vb.words();
  std::vector<std::uint64_t> cs;
  if (counts) cs = vb.counts();
  std::vector<std::size_t> only_a;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (vb.contains(va.word(i))) continue;
    only_a.push_back(i);
    words.push_back(va.word(i));
    if (counts) cs.push_back(va.count(i));
  }

  Matrix m(static_cast<Eigen::Index>(words.size()), b.dim());
  for (std::size_t i = 0; i < vb.size(); ++i) {
    const auto ia = va.find(vb.word(i));
    const auto row = static_cast<Eigen::Index>(i);
    if (ia) {
      m.row(row) = 0.5 * (a.row(*ia) * al.rotation + b.row(i));
      if (counts) cs[i] += va.count(*ia);
    } else {
      m.row(row) = b.row(i);
    }
  }
  for (std::size_t k = 0; k < only_a.size(); ++k)
    m.row(static_cast<Eigen::Index>(vb.size() + k)) = a.row(only_a[k]) * al.rotation;

  Vocabulary vocab = counts ? Vocabulary(std::move(words), std::move(cs))
                            : Vocabulary(std::move(words));
  return EmbeddingSpace(std::move(vocab), std::move(m), false);
}

}  // namespace

AlignmentResult procrustes(const EmbeddingSpace& a, const EmbeddingSpace& b) {
  if (a.dim() != b.dim()) throw DataError("cannot align spaces of different dimension");
  AlignmentResult r;
  r.joint_vocab = joint_vocabulary(a, b);
  if (r.joint_vocab.empty()) throw DataError("spaces share no vocabulary; cannot align");
  const Matrix xa = joint_rows(a, r.joint_vocab);
  const Matrix xb = joint_rows(b, r.joint_vocab);
  const Eigen::MatrixXd cross = xa.transpose() * xb;
  if (!cross.allFinite()) throw NumericalError("non-finite cross-covariance in Procrustes");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r.rotation = svd.matrixU() * svd.matrixV().transpose();
  if (!r.rotation.allFinite()) throw NumericalError("SVD failed in Procrustes alignment");
  r.residual = (xa * r.rotation - xb).norm();
  return r;
}

EmbeddingSpace aligned_average_pair(const EmbeddingSpace& a, const EmbeddingSpace& b) {
  if (!a.normalized() || !b.normalized())
    throw DataError("aligned averaging needs normalized input spaces");
  return average_unchecked(a, b);
}

EmbeddingSpace renormalize_dropping_zero(const EmbeddingSpace& space,
                                         std::vector<std::string>* dropped) {
  const Vocabulary& v = space.vocab();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double n = space.row(i).norm();
    if (n > 0.0 && std::isfinite(n))
      keep.push_back(i);
    else if (dropped)
      dropped->push_back(v.word(i));
  }
  if (keep.empty()) throw NumericalError("every row vanished during renormalization");
  std::vector<std::string> words;
  std::vector<std::uint64_t> cs;
  Matrix m(static_cast<Eigen::Index>(keep.size()), space.dim());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto row = space.row(keep[k]);
    m.row(static_cast<Eigen::Index>(k)) = row / row.norm();
    words.push_back(v.word(keep[k]));
    if (v.has_frequencies()) cs.push_back(v.count(keep[k]));
  }
  Vocabulary vocab = v.has_frequencies() ? Vocabulary(std::move(words), std::move(cs))
                                         : Vocabulary(std::move(words));
  return EmbeddingSpace(std::move(vocab), std::move(m), true);
}

EmbeddingSpace aligned_average_tree(std::span<const EmbeddingSpace> spaces,
                                    const TreeOptions& options,
                                    std::vector<std::string>* dropped) {
  if (spaces.empty()) throw UsageError("aligned averaging needs at least one space");
  std::vector<EmbeddingSpace> level(spaces.begin(), spaces.end());
  if (level.size() == 1) return level.front();
  for (const auto& s : level)
    if (!s.normalized()) throw DataError("aligned averaging needs normalized input spaces");
  if (options.pairing == Pairing::seeded) {
    Rng rng(options.seed);
    for (std::size_t i = level.size(); i > 1; --i)
      std::swap(level[i - 1], level[static_cast<std::size_t>(rng.below(i))]);
  }
  while (level.size() > 1) {
    std::vector<EmbeddingSpace> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      EmbeddingSpace avg = average_unchecked(level[i], level[i + 1]);
      if (options.renormalize) avg = renormalize_dropping_zero(avg, dropped);
      next.push_back(std::move(avg));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return std::move(level.front());
}

std::vector<WordPair> sample_word_pairs(const Vocabulary& vocab, std::size_t count,
                                        std::uint64_t seed) {
  if (vocab.size() < 2) throw DataError("need at least two words to sample pairs");
  Rng rng(seed);
  std::vector<WordPair> out;
  out.reserve(count);
  const auto v = static_cast<std::uint64_t>(vocab.size());
  while (out.size() < count) {
    const auto i = static_cast<std::size_t>(rng.below(v));
    const auto j = static_cast<std::size_t>(rng.below(v));
    if (i != j) out.emplace_back(vocab.word(i), vocab.word(j));
  }
  return out;
}

namespace {

// Mean over pairs of the across-run cosine mean and standard deviation.
std::pair<double, double> pair_moments(const RunSet& runs, const std::vector<WordPair>& pairs) {
  double mu_sum = 0.0, sigma_sum = 0.0;
  std::vector<double> cs(runs.size());
  for (const auto& [k, l] : pairs) {
    for (std::size_t r = 0; r < runs.size(); ++r) cs[r] = cosine(runs.spaces[r], k, l);
    mu_sum += mean(cs);
    sigma_sum += population_stddev(cs);
  }
  const double n = static_cast<double>(pairs.size());
  return {mu_sum / n, sigma_sum / n};
}

}  // namespace

BiasVarianceReport bias_variance_report(const RunSet& runs, const RunSet& averaged,
                                        const std::vector<WordPair>& word_pairs) {
  if (runs.size() < 2 || averaged.size() < 2)
    throw DataError("bias-variance report needs at least 2 spaces in each set");
  if (word_pairs.empty()) throw UsageError("bias-variance report needs word pairs");
  BiasVarianceReport r;
  std::tie(r.mu_original, r.sigma_original) = pair_moments(runs, word_pairs);
  std::tie(r.mu_averaged, r.sigma_averaged) = pair_moments(averaged, word_pairs);
  r.sigma_ratio = r.sigma_averaged / r.sigma_original;
  r.mu_ratio = r.mu_averaged / r.mu_original;
  r.pairs = word_pairs.size();
  return r;
}

}  // namespace embedstab
