#include "embedstab/gaussian_model.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"
#include "embedstab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

namespace embedstab {

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// P[X <= x] for X ~ N(mu, sigma^2); sigma == 0 is a step with value 1/2 at mu.
double below(double x, double mu, double sigma) {
  if (sigma > 0.0) return 0.5 * std::erfc(-(x - mu) / (std::sqrt(2.0) * sigma));
  if (x > mu) return 1.0;
  if (x < mu) return 0.0;
  return 0.5;
}

std::size_t entry_index(const StabilityProfile& profile, const std::string& query) {
  for (std::size_t i = 0; i < profile.entries.size(); ++i)
    if (profile.entries[i].query == query) return i;
  throw DataError("query '" + query + "' is not in the profile of '" + profile.target + "'");
}

void check_n(int n) {
  if (n != 1 && n != 2) throw UsageError("overlap prediction supports n = 1 or n = 2");
}

// Integrates  pdf_s(x) * g(x)  over x = mu_s + sigma_s * z, z in [-width, width];
// a zero sigma_s collapses the density to a point mass.
template <typename G>
double integrate_against(const PairStatistics& s, const G& g, const PredictionOptions& opt) {
  if (!(s.sigma > 0.0)) return g(s.mu);
  const auto f = [&](double z) { return std_normal_pdf(z) * g(s.mu + s.sigma * z); };
  return std::clamp(adaptive_simpson(f, -opt.width, opt.width, opt.tolerance), 0.0, 1.0);
}

// Probability that `query` beats every other retained entry.
double top1(const StabilityProfile& profile, std::size_t query,
            const std::vector<std::size_t>& retained, const PredictionOptions& opt) {
  std::vector<const PairStatistics*> others;
  for (std::size_t i : retained)
    if (i != query) others.push_back(&profile.entries[i]);
  const auto g = [&](double x) {
    double prod = 1.0;
    for (const auto* o : others) {
      prod *= below(x, o->mu, o->sigma);
      if (prod < 1e-300) return 0.0;
    }
    return prod;
  };
  return integrate_against(profile.entries[query], g, opt);
}

// Sum over competitors c of P[c first, query second]. The order of the two
// integrations is swapped relative to the nested form: for fixed query value
// x, c must exceed x and every other entry must stay below x.
double exactly_second(const StabilityProfile& profile, std::size_t query,
                      const std::vector<std::size_t>& retained, const PredictionOptions& opt) {
  std::vector<const PairStatistics*> others;
  for (std::size_t i : retained)
    if (i != query) others.push_back(&profile.entries[i]);
  const std::size_t m = others.size();
  if (m == 0) return 0.0;
  std::vector<double> cdf(m), prefix(m + 1), suffix(m + 1);
  const auto g = [&](double x) {
    for (std::size_t i = 0; i < m; ++i) cdf[i] = below(x, others[i]->mu, others[i]->sigma);
    prefix[0] = 1.0;
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * cdf[i];
    suffix[m] = 1.0;
    for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * cdf[i];
    double sum = 0.0;
    for (std::size_t c = 0; c < m; ++c) sum += (1.0 - cdf[c]) * prefix[c] * suffix[c + 1];
    return sum;
  };
  return integrate_against(profile.entries[query], g, opt);
}

StabilityProfile with_constant_sigma(const StabilityProfile& profile, double gamma) {
  StabilityProfile p = profile;
  for (auto& e : p.entries) e.sigma = gamma;
  return p;
}

}  // namespace

const PairStatistics* StabilityProfile::find(const std::string& query) const {
  for (const auto& e : entries)
    if (e.query == query) return &e;
  return nullptr;
}

double StabilityProfile::mean_sigma() const {
  if (entries.empty()) throw DataError("empty stability profile");
  double s = 0.0;
  for (const auto& e : entries) s += e.sigma;
  return s / static_cast<double>(entries.size());
}

PairStatistics pair_stats_from_samples(std::string target, std::string query,
                                       std::span<const double> cosines,
                                       SigmaEstimator estimator) {
  if (cosines.empty()) throw DataError("no samples for pair (" + target + ", " + query + ")");
  const double r = static_cast<double>(cosines.size());
  const double mu = std::accumulate(cosines.begin(), cosines.end(), 0.0) / r;
  double ss = 0.0;
  for (double c : cosines) ss += (c - mu) * (c - mu);
  double var = 0.0;
  if (estimator == SigmaEstimator::maximum_likelihood)
    var = ss / r;
  else if (cosines.size() > 1)
    var = ss / (r - 1.0);
  return {std::move(target), std::move(query), std::clamp(mu, -1.0, 1.0), std::sqrt(var),
          cosines.size()};
}

PairStatistics estimate_pair_stats(const RunSet& runs, const std::string& target,
                                   const std::string& query, SigmaEstimator estimator) {
  if (runs.size() == 0) throw DataError("cannot estimate pair statistics from zero runs");
  std::vector<double> cs;
  cs.reserve(runs.size());
  for (const auto& s : runs.spaces) cs.push_back(cosine(s, target, query));
  return pair_stats_from_samples(target, query, cs, estimator);
}

StabilityProfile estimate_profile(const RunSet& runs, const std::string& target,
                                  const std::optional<std::vector<std::string>>& queries,
                                  SigmaEstimator estimator) {
  if (runs.size() == 0) throw DataError("cannot estimate a profile from zero runs");
  std::vector<std::string> qs;
  if (queries) {
    for (const auto& q : *queries)
      if (q != target) qs.push_back(q);
  } else {
    const Vocabulary joint = runs.joint_vocabulary();
    for (const auto& w : joint.words())
      if (w != target) qs.push_back(w);
  }
  // samples[q][run]
  std::vector<std::vector<double>> samples(qs.size(), std::vector<double>(runs.size()));
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& space = runs.spaces[r];
    const auto t = space.row(target);
    const double tn = t.norm();
    for (std::size_t q = 0; q < qs.size(); ++q) {
      const auto row = space.row(qs[q]);
      samples[q][r] = std::clamp(t.dot(row) / (tn * row.norm()), -1.0, 1.0);
    }
  }
  StabilityProfile p;
  p.target = target;
  p.entries.reserve(qs.size());
  for (std::size_t q = 0; q < qs.size(); ++q)
    p.entries.push_back(pair_stats_from_samples(target, qs[q], samples[q], estimator));
  return p;
}

double prob_greater_argument(const PairStatistics& a, const PairStatistics& b) {
  const double var = a.sigma * a.sigma + b.sigma * b.sigma;
  const double diff = a.mu - b.mu;
  if (var == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? HUGE_VAL : -HUGE_VAL;
  }
  return diff / std::sqrt(2.0 * var);
}

double prob_greater(const PairStatistics& a, const PairStatistics& b) {
  // erfc keeps the lower tail accurate where 1 + erf(x) would cancel.
  return 0.5 * std::erfc(-prob_greater_argument(a, b));
}

std::vector<std::size_t> relevant_entries(const StabilityProfile& profile, int n,
                                          const PredictionOptions& options) {
  check_n(n);
  const auto& e = profile.entries;
  if (e.empty()) return {};
  std::vector<std::size_t> by_mu(e.size());
  std::iota(by_mu.begin(), by_mu.end(), std::size_t{0});
  std::stable_sort(by_mu.begin(), by_mu.end(), [&](std::size_t a, std::size_t b) {
    if (e[a].mu != e[b].mu) return e[a].mu > e[b].mu;
    return e[a].query < e[b].query;
  });
  const std::size_t ref_pos = std::min(static_cast<std::size_t>(n), e.size()) - 1;
  const PairStatistics& reference = e[by_mu[ref_pos]];
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (prob_greater(e[i], reference) >= options.pruning_threshold) keep.push_back(i);
  return keep;
}

double predict_p_hash1(const StabilityProfile& profile, const std::string& query,
                       const PredictionOptions& options) {
  const std::size_t q = entry_index(profile, query);
  const auto retained = relevant_entries(profile, 1, options);
  if (std::find(retained.begin(), retained.end(), q) == retained.end()) return 0.0;
  return top1(profile, q, retained, options);
}

double predict_p_hash2(const StabilityProfile& profile, const std::string& query,
                       const PredictionOptions& options) {
  const std::size_t q = entry_index(profile, query);
  const auto retained = relevant_entries(profile, 2, options);
  if (std::find(retained.begin(), retained.end(), q) == retained.end()) return 0.0;
  return std::min(1.0, top1(profile, q, retained, options) +
                           exactly_second(profile, q, retained, options));
}

double expected_overlap(const StabilityProfile& profile, int n, const PredictionOptions& options) {
  check_n(n);
  const auto retained = relevant_entries(profile, n, options);
  double sum = 0.0;
  for (std::size_t q : retained) {
    double p = top1(profile, q, retained, options);
    if (n == 2) p = std::min(1.0, p + exactly_second(profile, q, retained, options));
    sum += p * p;
  }
  return std::clamp(sum / n, 0.0, 1.0);
}

double structure_factor(const StabilityProfile& profile, int n, std::optional<double> gamma,
                        const PredictionOptions& options) {
  if (profile.entries.empty()) throw DataError("empty stability profile");
  const double g = gamma.value_or(profile.mean_sigma());
  if (g < 0.0) throw UsageError("gamma must be non-negative");
  return expected_overlap(with_constant_sigma(profile, g), n, options);
}

void save_profiles(std::span<const StabilityProfile> profiles, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write profile file " + path.string());
  out << "target\tquery\tmu\tsigma\tr\n";
  for (const auto& p : profiles)
    for (const auto& e : p.entries)
      out << e.target << '\t' << e.query << '\t' << detail::format_double(e.mu) << '\t'
          << detail::format_double(e.sigma) << '\t' << e.r << '\n';
  if (!out) throw DataError("I/O failure while writing " + path.string());
}

std::vector<StabilityProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profile file " + path.string());
  std::vector<StabilityProfile> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = detail::split_ws(line);
    if (f.empty()) continue;
    if (line_no == 1 && f[0] == "target") continue;
    PairStatistics e;
    if (f.size() != 5 || !detail::parse_double(f[2], e.mu) ||
        !detail::parse_double(f[3], e.sigma) || !detail::parse_int(f[4], e.r) || e.sigma < 0.0)
      throw DataError("malformed profile line " + path.string() + ":" + std::to_string(line_no));
    e.target = std::string(f[0]);
    e.query = std::string(f[1]);
    if (out.empty() || out.back().target != e.target) out.push_back({e.target, {}});
    out.back().entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace embedstab
