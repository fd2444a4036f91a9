#include "embedstab/pip_metrics.hpp"

#include "embedstab/error.hpp"
#include "embedstab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace embedstab {

namespace {

constexpr Eigen::Index kBlockRows = 256;

void require_normalized(const EmbeddingSpace& s, const char* which) {
  if (!s.normalized())
    throw DataError(std::string("PIP loss needs a normalized space; ") + which +
                    " is not flagged normalized");
}

Matrix proxy_rows(const EmbeddingSpace& s, const ProxySample& proxy) {
  Matrix m(static_cast<Eigen::Index>(proxy.size()), s.dim());
  for (std::size_t i = 0; i < proxy.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = s.row(s.vocab().index_of(proxy.words[i]));
  return m;
}

void check_inputs(const EmbeddingSpace& a, const EmbeddingSpace& b, const ProxySample& proxy) {
  require_normalized(a, "first space");
  require_normalized(b, "second space");
  if (proxy.size() == 0) throw UsageError("empty proxy sample");
}

}  // namespace

ProxySample draw_proxy(const Vocabulary& vocab, std::size_t size, std::uint64_t seed) {
  if (vocab.empty()) throw DataError("cannot draw a proxy sample from an empty vocabulary");
  if (size == 0) throw UsageError("proxy size must be positive");
  const std::size_t v = vocab.size();
  const std::size_t k = std::min(size, v);
  std::vector<std::size_t> idx(v);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(v - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  ProxySample p;
  p.seed = seed;
  p.words.reserve(k);
  for (std::size_t i : idx) p.words.push_back(vocab.word(i));
  return p;
}

ProxySample full_proxy(const Vocabulary& vocab) { return {vocab.words(), 0}; }

double pip_loss(const EmbeddingSpace& a, const EmbeddingSpace& b, const ProxySample& proxy) {
  check_inputs(a, b, proxy);
  const Matrix pa = proxy_rows(a, proxy);
  const Matrix pb = proxy_rows(b, proxy);
  const Eigen::Index n = pa.rows();
  // Row blocks of the difference of Gram matrices; the block sums are added
  // in a fixed order.
  double ss = 0.0;
  for (Eigen::Index start = 0; start < n; start += kBlockRows) {
    const Eigen::Index len = std::min(kBlockRows, n - start);
    const Matrix diff = pa.middleRows(start, len) * pa.transpose() -
                        pb.middleRows(start, len) * pb.transpose();
    ss += diff.squaredNorm();
  }
  return std::sqrt(ss);
}

double reduced_pip_loss(const EmbeddingSpace& a, const EmbeddingSpace& b,
                        const ProxySample& proxy) {
  return pip_loss(a, b, proxy) / (2.0 * static_cast<double>(proxy.size()));
}

std::vector<double> wordwise_reduced_pip_losses(std::span<const std::string> words,
                                                const EmbeddingSpace& a, const EmbeddingSpace& b,
                                                const ProxySample& proxy) {
  check_inputs(a, b, proxy);
  const Matrix pa = proxy_rows(a, proxy);
  const Matrix pb = proxy_rows(b, proxy);
  Matrix wa(static_cast<Eigen::Index>(words.size()), a.dim());
  Matrix wb(static_cast<Eigen::Index>(words.size()), b.dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    wa.row(static_cast<Eigen::Index>(i)) = a.row(words[i]);
    wb.row(static_cast<Eigen::Index>(i)) = b.row(words[i]);
  }
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(proxy.size())));
  std::vector<double> out(words.size());
  for (Eigen::Index start = 0; start < wa.rows(); start += kBlockRows) {
    const Eigen::Index len = std::min(kBlockRows, wa.rows() - start);
    const Matrix diff = wa.middleRows(start, len) * pa.transpose() -
                        wb.middleRows(start, len) * pb.transpose();
    for (Eigen::Index i = 0; i < len; ++i)
      out[static_cast<std::size_t>(start + i)] = scale * diff.row(i).norm();
  }
  return out;
}

double wordwise_reduced_pip_loss(const std::string& word, const EmbeddingSpace& a,
                                 const EmbeddingSpace& b, const ProxySample& proxy) {
  return wordwise_reduced_pip_losses(std::span<const std::string>(&word, 1), a, b, proxy)[0];
}

double expected_wordwise_pip(const StabilityProfile& profile) {
  if (profile.entries.empty()) throw DataError("empty stability profile");
  double ss = 0.0;
  for (const auto& e : profile.entries) ss += e.sigma * e.sigma;
  return std::sqrt(ss / (2.0 * static_cast<double>(profile.entries.size())));
}

double chi_relative_width(double v) {
  if (!(v >= 1.0)) throw UsageError("Chi degrees of freedom must be >= 1");
  const double mu = std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v));
  return std::sqrt(std::max(0.0, v - mu * mu)) / mu;
}

}  // namespace embedstab
