#include "embedstab/instability.hpp"

#include "embedstab/error.hpp"
#include "embedstab/stats.hpp"

#include <cmath>

namespace embedstab {

namespace {

void require_runs(const RunSet& runs, const char* what) {
  if (runs.size() < 2)
    throw DataError(std::string(what) + " run set needs at least 2 runs, got " +
                    std::to_string(runs.size()));
  runs.validate();
}

std::vector<double> values(const std::vector<PairLoss>& pairs) {
  std::vector<double> v;
  v.reserve(pairs.size());
  for (const auto& p : pairs) v.push_back(p.value);
  return v;
}

std::optional<double> excess_root(double boot, double intrinsic) {
  const double x = boot - intrinsic;
  if (x < 0.0) return std::nullopt;
  return std::sqrt(x);
}

// Mean word-wise loss of each word over all pairs of a run set.
std::vector<double> mean_wordwise(const std::vector<std::string>& words, const RunSet& runs,
                                  const ProxySample& proxy) {
  std::vector<double> sum(words.size(), 0.0);
  const auto pairs = run_pairs(runs.size());
  for (const auto& [i, j] : pairs) {
    const auto d = wordwise_reduced_pip_losses(words, runs.spaces[i], runs.spaces[j], proxy);
    for (std::size_t k = 0; k < d.size(); ++k) sum[k] += d[k];
  }
  for (double& s : sum) s /= static_cast<double>(pairs.size());
  return sum;
}

}  // namespace

std::vector<PairLoss> pairwise_reduced_pip(const RunSet& runs, const ProxySample& proxy) {
  require_runs(runs, "a");
  std::vector<PairLoss> out;
  for (const auto& [i, j] : run_pairs(runs.size()))
    out.push_back({i, j, reduced_pip_loss(runs.spaces[i], runs.spaces[j], proxy)});
  return out;
}

InstabilityReport intrinsic_instability(const RunSet& shuffled, const ProxySample& proxy) {
  require_runs(shuffled, "shuffled");
  InstabilityReport r;
  r.shuffled_pairs = pairwise_reduced_pip(shuffled, proxy);
  const auto v = values(r.shuffled_pairs);
  r.intrinsic = mean(v);
  r.intrinsic_std = population_stddev(v);
  r.proxy_size = proxy.size();
  r.proxy_seed = proxy.seed;
  return r;
}

InstabilityReport extrinsic_instability(const RunSet& shuffled, const RunSet& bootstrapped,
                                        const ProxySample& proxy) {
  require_runs(bootstrapped, "bootstrapped");
  InstabilityReport r = intrinsic_instability(shuffled, proxy);
  r.has_bootstrap = true;
  r.bootstrap_pairs = pairwise_reduced_pip(bootstrapped, proxy);
  const auto v = values(r.bootstrap_pairs);
  r.bootstrap_mean = mean(v);
  r.bootstrap_std = population_stddev(v);
  r.extrinsic = excess_root(r.bootstrap_mean, r.intrinsic);
  if (r.extrinsic && *r.extrinsic > 0.0) {
    // First-order propagation through the square root.
    const double sd = std::hypot(r.bootstrap_std, r.intrinsic_std);
    r.extrinsic_std = sd / (2.0 * *r.extrinsic);
  }
  return r;
}

std::vector<WordInstability> wordwise_instabilities(const std::vector<std::string>& words,
                                                    const RunSet& shuffled,
                                                    const RunSet* bootstrapped,
                                                    const ProxySample& proxy) {
  require_runs(shuffled, "shuffled");
  if (bootstrapped) require_runs(*bootstrapped, "bootstrapped");
  const auto intr = mean_wordwise(words, shuffled, proxy);
  std::vector<double> boot;
  if (bootstrapped) boot = mean_wordwise(words, *bootstrapped, proxy);
  std::vector<WordInstability> out;
  out.reserve(words.size());
  for (std::size_t k = 0; k < words.size(); ++k) {
    WordInstability w{words[k], intr[k], std::nullopt};
    if (bootstrapped) w.extrinsic = excess_root(boot[k], intr[k]);
    out.push_back(std::move(w));
  }
  return out;
}

WordInstability wordwise_instability(const std::string& word, const RunSet& shuffled,
                                     const RunSet& bootstrapped, const ProxySample& proxy) {
  return wordwise_instabilities({word}, shuffled, &bootstrapped, proxy).front();
}

}  // namespace embedstab
