#pragma once

#include "embedstab/pip_metrics.hpp"
#include "embedstab/run_set.hpp"

#include <optional>
#include <string>
#include <vector>

namespace embedstab {

/// Reduced PIP loss of one run pair.
struct PairLoss {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

/// Reduced PIP loss for every unordered pair of the run set (needs >= 2 runs).
std::vector<PairLoss> pairwise_reduced_pip(const RunSet& runs, const ProxySample& proxy);

struct InstabilityReport {
  double intrinsic = 0.0;       // mean over shuffled pairs
  double intrinsic_std = 0.0;   // population std over the same pairs
  std::vector<PairLoss> shuffled_pairs;

  bool has_bootstrap = false;
  double bootstrap_mean = 0.0;
  double bootstrap_std = 0.0;
  std::vector<PairLoss> bootstrap_pairs;
  // Empty when the bootstrap mean falls below the intrinsic value.
  std::optional<double> extrinsic;
  std::optional<double> extrinsic_std;

  std::size_t proxy_size = 0;
  std::uint64_t proxy_seed = 0;
};

/// Text used in reports for an undefined extrinsic value.
inline constexpr const char* kUndefined = "undefined";

InstabilityReport intrinsic_instability(const RunSet& shuffled, const ProxySample& proxy);

/// I_ext = sqrt(mean_boot - I_int); undefined when the radicand is negative.
InstabilityReport extrinsic_instability(const RunSet& shuffled, const RunSet& bootstrapped,
                                        const ProxySample& proxy);

struct WordInstability {
  std::string word;
  double intrinsic = 0.0;
  std::optional<double> extrinsic;
};

/// J_int and J_ext of one word.
WordInstability wordwise_instability(const std::string& word, const RunSet& shuffled,
                                     const RunSet& bootstrapped, const ProxySample& proxy);

/// J_int for many words; the bootstrap set may be omitted (extrinsic left empty).
std::vector<WordInstability> wordwise_instabilities(const std::vector<std::string>& words,
                                                    const RunSet& shuffled,
                                                    const RunSet* bootstrapped,
                                                    const ProxySample& proxy);

}  // namespace embedstab
