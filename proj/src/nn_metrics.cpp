#include "embedstab/nn_metrics.hpp"

#include "embedstab/error.hpp"
#include "embedstab/stats.hpp"

#include <algorithm>
#include <unordered_set>

namespace embedstab {

OverlapMeasurement OverlapMeasurement::from_counts(std::string target, std::size_t n,
                                                   std::size_t m) {
  if (n == 0 || m > n) throw UsageError("overlap requires 0 <= m <= n and n >= 1");
  OverlapMeasurement o;
  o.target = std::move(target);
  o.n = n;
  o.m = m;
  o.p_at_n = static_cast<double>(m) / static_cast<double>(n);
  o.j_at_n = static_cast<double>(m) / static_cast<double>(2 * n - m);
  return o;
}

OverlapMeasurement overlap_of_lists(const std::string& target,
                                    std::span<const std::string> ranked_a,
                                    std::span<const std::string> ranked_b, std::size_t n) {
  if (n == 0 || ranked_a.size() < n || ranked_b.size() < n)
    throw UsageError("both lists need at least n entries");
  std::unordered_set<std::string_view> top_a;
  for (std::size_t i = 0; i < n; ++i) top_a.insert(ranked_a[i]);
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) m += top_a.count(ranked_b[i]);
  return OverlapMeasurement::from_counts(target, n, m);
}

OverlapMeasurement p_at_n(const EmbeddingSpace& a, const EmbeddingSpace& b,
                          const std::string& target, std::size_t n) {
  const Vocabulary joint = joint_vocabulary(a, b);
  if (!joint.contains(target))
    throw DataError("target '" + target + "' is not in both vocabularies");
  if (n < 1 || n + 1 > joint.size())
    throw UsageError("n = " + std::to_string(n) + " exceeds joint vocabulary size - 1");
  std::vector<std::string> la, lb;
  for (auto& nb : nearest_neighbors_within(a, target, n, joint)) la.push_back(std::move(nb.word));
  for (auto& nb : nearest_neighbors_within(b, target, n, joint)) lb.push_back(std::move(nb.word));
  return overlap_of_lists(target, la, lb, n);
}

double p_to_j(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must lie in [0, 1]");
  return p / (2.0 - p);
}

std::vector<MeanOverlap> mean_overlap(const RunSet& runs, const std::vector<std::string>& targets,
                                      std::size_t n) {
  if (runs.size() < 2) throw DataError("mean overlap needs at least 2 runs");
  const Vocabulary joint = runs.joint_vocabulary();
  if (n < 1 || n + 1 > joint.size())
    throw UsageError("n = " + std::to_string(n) + " exceeds joint vocabulary size - 1");
  const auto pairs = run_pairs(runs.size());

  std::vector<MeanOverlap> out;
  out.reserve(targets.size());
  std::vector<std::vector<std::string>> lists(runs.size());
  for (const auto& t : targets) {
    if (!joint.contains(t)) throw DataError("target '" + t + "' is not in the joint vocabulary");
    for (std::size_t r = 0; r < runs.size(); ++r) {
      lists[r].clear();
      for (auto& nb : nearest_neighbors_within(runs.spaces[r], t, n, joint))
        lists[r].push_back(std::move(nb.word));
    }
    MeanOverlap mo{t, n, 0.0, 0.0, pairs.size()};
    for (const auto& [i, j] : pairs) {
      const auto o = overlap_of_lists(t, lists[i], lists[j], n);
      mo.mean_p += o.p_at_n;
      mo.mean_j += o.j_at_n;
    }
    mo.mean_p /= static_cast<double>(pairs.size());
    mo.mean_j /= static_cast<double>(pairs.size());
    out.push_back(std::move(mo));
  }
  return out;
}

OverlapConsistency overlap_consistency(const RunSet& first, const RunSet& second,
                                       const std::vector<std::string>& targets, std::size_t n) {
  const auto a = mean_overlap(first, targets, n);
  const auto b = mean_overlap(second, targets, n);
  std::vector<double> pa, pb, ja, jb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa.push_back(a[i].mean_p);
    pb.push_back(b[i].mean_p);
    ja.push_back(a[i].mean_j);
    jb.push_back(b[i].mean_j);
  }
  OverlapConsistency c;
  c.targets = targets.size();
  c.rho_p = spearman(pa, pb).rho;
  c.rho_j = spearman(ja, jb).rho;
  return c;
}

}  // namespace embedstab
