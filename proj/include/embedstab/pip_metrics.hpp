#pragma once

#include "embedstab/embedding_space.hpp"
#include "embedstab/gaussian_model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace embedstab {

/// Random subset V' of a joint vocabulary over which PIP losses are summed.
struct ProxySample {
  std::vector<std::string> words;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return words.size(); }
};

inline constexpr std::size_t kDefaultProxySize = 20000;

/// Draws min(size, |vocab|) distinct words without replacement; the result
/// keeps the vocabulary order.
ProxySample draw_proxy(const Vocabulary& vocab, std::size_t size, std::uint64_t seed);

/// Every word of `vocab`.
ProxySample full_proxy(const Vocabulary& vocab);

/// ||A A^T - B B^T||_F over proxy x proxy entries. Both spaces must be
/// flagged normalized.
double pip_loss(const EmbeddingSpace& a, const EmbeddingSpace& b, const ProxySample& proxy);

/// pip_loss / (2 |V'|), in [0, 1].
double reduced_pip_loss(const EmbeddingSpace& a, const EmbeddingSpace& b, const ProxySample& proxy);

/// (1 / (2 sqrt|V'|)) * || A_{V'} a_w - B_{V'} b_w ||.
double wordwise_reduced_pip_loss(const std::string& word, const EmbeddingSpace& a,
                                 const EmbeddingSpace& b, const ProxySample& proxy);

/// wordwise_reduced_pip_loss for many words at once.
std::vector<double> wordwise_reduced_pip_losses(std::span<const std::string> words,
                                                const EmbeddingSpace& a, const EmbeddingSpace& b,
                                                const ProxySample& proxy);

/// sqrt( sum_l sigma_l^2 / (2 |V'|) ), |V'| being the number of profile entries.
double expected_wordwise_pip(const StabilityProfile& profile);

/// sigma_v / mu_v of the Chi distribution with v degrees of freedom.
double chi_relative_width(double v);

}  // namespace embedstab
