#include "embedstab/semantic_change.hpp"

#include "detail/text.hpp"
#include "embedstab/error.hpp"
#include "embedstab/rng.hpp"
#include "embedstab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace embedstab {

double semantic_change(const std::string& word, const EmbeddingSpace& t1,
                       const EmbeddingSpace& t2, const AlignmentResult& alignment) {
  if (alignment.rotation.rows() != t1.dim() || alignment.rotation.cols() != t2.dim())
    throw UsageError("alignment does not match the epoch spaces");
  const RowVector a = t1.row(word) * alignment.rotation;
  const auto b = t2.row(word);
  const double c = a.dot(b) / (a.norm() * b.norm());
  return 1.0 - std::clamp(c, -1.0, 1.0);
}

std::map<std::string, double> all_changes(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                                          const AlignmentResult& alignment) {
  std::map<std::string, double> out;
  const Vocabulary joint = joint_vocabulary(t1, t2);
  for (const auto& w : joint.words())
    out.emplace(w, semantic_change(w, t1, t2, alignment));
  return out;
}

Classification classify_targets(const std::map<std::string, double>& deltas,
                                const std::vector<std::string>& scored_vocab,
                                const std::vector<std::string>& targets) {
  if (scored_vocab.empty()) throw DataError("empty scored vocabulary");
  const auto lookup = [&](const std::string& w) {
    const auto it = deltas.find(w);
    if (it == deltas.end()) throw DataError("no change score for word '" + w + "'");
    return it->second;
  };
  std::vector<double> scored;
  scored.reserve(scored_vocab.size());
  for (const auto& w : scored_vocab) scored.push_back(lookup(w));
  Classification c;
  c.mu = mean(scored);
  c.sigma = population_stddev(scored);
  c.tau = c.mu + 0.5 * c.sigma;
  for (const auto& t : targets)
    c.labels[t] = lookup(t) > c.tau ? ChangeLabel::changed : ChangeLabel::unchanged;
  return c;
}

std::vector<std::string> scored_vocabulary(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                                           std::uint64_t min_count) {
  const Vocabulary joint = joint_vocabulary(t1, t2);
  std::vector<std::string> out;
  for (const auto& w : joint.words()) {
    if (t1.vocab().has_frequencies() && t1.vocab().count(w) < min_count) continue;
    if (t2.vocab().has_frequencies() && t2.vocab().count(w) < min_count) continue;
    out.push_back(w);
  }
  return out;
}

ChangeReport detect_change(const EmbeddingSpace& t1, const EmbeddingSpace& t2,
                           const std::vector<std::string>& targets, std::uint64_t min_count) {
  const EmbeddingSpace n1 = t1.normalized() ? t1 : normalize(t1);
  const EmbeddingSpace n2 = t2.normalized() ? t2 : normalize(t2);
  const AlignmentResult al = procrustes(n1, n2);
  const auto deltas = all_changes(n1, n2, al);
  ChangeReport r;
  r.residual = al.residual;
  r.scored_vocab = scored_vocabulary(t1, t2, min_count);
  r.classification = classify_targets(deltas, r.scored_vocab, targets);
  for (const auto& t : targets) r.ranking.push_back({t, deltas.at(t)});
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [](const auto& a, const auto& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.word < b.word;
  });
  return r;
}

namespace {

template <typename T, typename Parse>
std::map<std::string, T> load_word_values(const std::filesystem::path& path, Parse parse) {
  std::map<std::string, T> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gold file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = detail::split_ws(line);
    if (f.empty()) continue;
    T value{};
    if (f.size() != 2 || !parse(f[1], value))
      throw DataError("malformed gold line " + path.string() + ":" + std::to_string(line_no));
    if (!out.emplace(std::string(f[0]), value).second)
      throw DataError("duplicate gold word at " + path.string() + ":" + std::to_string(line_no));
  }
  return out;
}

}  // namespace

GoldData load_gold(const std::filesystem::path& binary, const std::filesystem::path& graded) {
  GoldData g;
  g.binary = load_word_values<int>(binary, [](std::string_view s, int& v) {
    return detail::parse_int(s, v) && (v == 0 || v == 1);
  });
  g.graded = load_word_values<double>(graded, [](std::string_view s, double& v) {
    return detail::parse_double(s, v) && std::isfinite(v);
  });
  return g;
}

Evaluation evaluate(const ChangeReport& report, const GoldData& gold) {
  std::unordered_map<std::string, double> delta;
  for (const auto& r : report.ranking) delta.emplace(r.word, r.delta);
  std::vector<std::string> missing;
  for (const auto& [w, v] : gold.binary)
    if (!report.classification.labels.contains(w)) missing.push_back(w);
  for (const auto& [w, v] : gold.graded)
    if (!delta.contains(w) && std::find(missing.begin(), missing.end(), w) == missing.end())
      missing.push_back(w);
  if (!missing.empty()) {
    std::string msg = "gold targets missing from the change report:";
    for (const auto& w : missing) msg += " " + w;
    throw DataError(msg);
  }
  Evaluation e;
  if (!gold.binary.empty()) {
    std::size_t correct = 0;
    for (const auto& [w, v] : gold.binary)
      if (static_cast<int>(report.classification.labels.at(w)) == v) ++correct;
    e.binary_targets = gold.binary.size();
    e.accuracy = static_cast<double>(correct) / static_cast<double>(e.binary_targets);
  }
  if (gold.graded.size() >= 3) {
    std::vector<double> pred, truth;
    for (const auto& [w, v] : gold.graded) {
      pred.push_back(delta.at(w));
      truth.push_back(v);
    }
    const auto s = spearman(pred, truth);
    e.graded_targets = gold.graded.size();
    e.rho = s.rho;
    e.rho_p_value = s.p_value;
  }
  return e;
}

void write_answers(const ChangeReport& report, const std::filesystem::path& binary_path,
                   const std::filesystem::path& graded_path) {
  std::vector<RankedWord> by_word = report.ranking;
  std::sort(by_word.begin(), by_word.end(),
            [](const auto& a, const auto& b) { return a.word < b.word; });
  std::ofstream bin(binary_path, std::ios::binary | std::ios::trunc);
  std::ofstream gr(graded_path, std::ios::binary | std::ios::trunc);
  if (!bin || !gr) throw DataError("cannot write answer files");
  for (const auto& r : by_word) {
    bin << r.word << '\t' << static_cast<int>(report.classification.labels.at(r.word)) << '\n';
    gr << r.word << '\t' << detail::format_double(r.delta) << '\n';
  }
  if (!bin || !gr) throw DataError("I/O failure while writing answer files");
}

// --- frequency effect --------------------------------------------------------

namespace {

struct GroupSums {
  double n = 0.0, x = 0.0, y = 0.0, xx = 0.0, xy = 0.0;
};

struct ProfiledFit {
  Eigen::Vector2d beta;
  Eigen::Matrix2d xtvx_inv;
  double sigma_e2 = 0.0;
  double loglik = 0.0;
};

class RandomInterceptModel {
 public:
  RandomInterceptModel(std::span<const std::size_t> group, std::span<const double> y,
                       std::span<const double> x)
      : y_(y), x_(x) {
    std::unordered_map<std::size_t, std::size_t> ids;
    dense_.reserve(group.size());
    for (std::size_t g : group) {
      const auto [it, fresh] = ids.emplace(g, ids.size());
      dense_.push_back(it->second);
    }
    sums_.resize(ids.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      auto& s = sums_[dense_[i]];
      s.n += 1.0;
      s.x += x[i];
      s.y += y[i];
      s.xx += x[i] * x[i];
      s.xy += x[i] * y[i];
    }
  }

  std::size_t groups() const { return sums_.size(); }

  ProfiledFit fit(double lambda) const {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    double logdet = 0.0;
    for (const auto& s : sums_) {
      const double c = lambda / (1.0 + lambda * s.n);
      const Eigen::Vector2d s1(s.n, s.x);
      Eigen::Matrix2d xtx;
      xtx << s.n, s.x, s.x, s.xx;
      a += xtx - c * s1 * s1.transpose();
      b += Eigen::Vector2d(s.y, s.xy) - c * s1 * s.y;
      logdet += std::log1p(lambda * s.n);
    }
    ProfiledFit f;
    f.xtvx_inv = a.inverse();
    f.beta = f.xtvx_inv * b;
    // Residual quadratic form r^T V^-1 r, accumulated from the residuals
    // themselves rather than by subtraction.
    std::vector<double> rs(sums_.size(), 0.0);
    double rr = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double r = y_[i] - f.beta(0) - f.beta(1) * x_[i];
      rr += r * r;
      rs[dense_[i]] += r;
    }
    double q = rr;
    for (std::size_t g = 0; g < sums_.size(); ++g)
      q -= lambda / (1.0 + lambda * sums_[g].n) * rs[g] * rs[g];
    const double n = static_cast<double>(y_.size());
    f.sigma_e2 = std::max(q, 0.0) / n;
    f.loglik = -0.5 * (n * std::log(std::max(f.sigma_e2, 1e-300)) + logdet);
    return f;
  }

 private:
  std::span<const double> y_;
  std::span<const double> x_;
  std::vector<std::size_t> dense_;
  std::vector<GroupSums> sums_;
};

std::vector<double> standardize(std::vector<double> v, const char* what) {
  const double m = mean(v);
  const double sd = population_stddev(v);
  if (!(sd > 0.0)) throw DataError(std::string("degenerate design: constant ") + what);
  for (double& x : v) x = (x - m) / sd;
  return v;
}

}  // namespace

FrequencyEffectResult fit_random_intercept(std::span<const std::size_t> group,
                                           std::span<const double> y, std::span<const double> x) {
  if (group.size() != y.size() || y.size() != x.size())
    throw UsageError("random-intercept fit: length mismatch");
  const RandomInterceptModel model(group, y, x);
  if (model.groups() < 2) throw DataError("frequency effect needs at least 2 words");
  if (!(population_stddev(x) > 0.0))
    throw DataError("degenerate design: constant predictor");

  constexpr double lo = -6.0 * 2.302585092994046, hi = 6.0 * 2.302585092994046;
  constexpr int grid = 61;
  const auto loglik = [&](double t) { return model.fit(std::exp(t)).loglik; };
  int best = 0;
  double best_ll = -HUGE_VAL;
  for (int i = 0; i < grid; ++i) {
    const double ll = loglik(lo + (hi - lo) * i / (grid - 1));
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  // Golden-section refinement inside the grid cell pair around the best node.
  double a = lo + (hi - lo) * std::max(best - 1, 0) / (grid - 1);
  double b = lo + (hi - lo) * std::min(best + 1, grid - 1) / (grid - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = loglik(c), fd = loglik(d);
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = loglik(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = loglik(d);
    }
  }
  double t = 0.5 * (a + b);
  if (loglik(t) < best_ll) t = lo + (hi - lo) * best / (grid - 1);
  const double lambda = std::exp(t);
  const ProfiledFit f = model.fit(lambda);
  if (!f.beta.allFinite()) throw NumericalError("random-intercept fit did not converge");

  FrequencyEffectResult r;
  r.beta_0 = f.beta(0);
  r.beta_f = f.beta(1);
  r.sigma_e2 = f.sigma_e2;
  r.sigma_z2 = lambda * f.sigma_e2;
  r.beta_f_se = std::sqrt(std::max(0.0, f.sigma_e2 * f.xtvx_inv(1, 1)));
  const double sx = population_stddev(x);
  const double fixed = r.beta_f * r.beta_f * sx * sx;
  const double total = fixed + r.sigma_z2 + r.sigma_e2;
  r.var_explained = total > 0.0 ? std::clamp(fixed / total, 0.0, 1.0) : 0.0;
  r.n_observations = y.size();
  r.n_words = model.groups();
  return r;
}

FrequencyEffectResult frequency_effect(const std::vector<ChangeObservation>& observations) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::size_t> group;
  std::vector<double> y, x;
  for (const auto& o : observations) {
    if (!(o.delta > 0.0) || !std::isfinite(o.delta))
      throw DataError("change score of '" + o.word + "' must be positive to log-transform");
    if (!(o.frequency > 0.0) || !std::isfinite(o.frequency))
      throw DataError("frequency of '" + o.word + "' must be positive");
    group.push_back(ids.emplace(o.word, ids.size()).first->second);
    y.push_back(std::log(o.delta));
    x.push_back(std::log(o.frequency));
  }
  if (ids.size() < 2) throw DataError("frequency effect needs at least 2 words");
  y = standardize(std::move(y), "change score");
  x = standardize(std::move(x), "frequency");
  return fit_random_intercept(group, y, x);
}

std::vector<ChangeObservation> change_observations(std::span<const EmbeddingSpace> epochs,
                                                   std::uint64_t min_count) {
  if (epochs.size() < 2) throw DataError("change observations need at least 2 epochs");
  std::vector<double> totals;
  for (const auto& e : epochs) {
    if (!e.vocab().has_frequencies())
      throw DataError("change observations need word frequencies for every epoch");
    double t = 0.0;
    for (auto c : e.vocab().counts()) t += static_cast<double>(c);
    totals.push_back(t);
  }
  std::vector<ChangeObservation> out;
  for (std::size_t p = 0; p + 1 < epochs.size(); ++p) {
    const EmbeddingSpace& t1 = epochs[p];
    const EmbeddingSpace& t2 = epochs[p + 1];
    const EmbeddingSpace n1 = t1.normalized() ? t1 : normalize(t1);
    const EmbeddingSpace n2 = t2.normalized() ? t2 : normalize(t2);
    const AlignmentResult al = procrustes(n1, n2);
    for (const auto& w : scored_vocabulary(t1, t2, min_count)) {
      const double f = 0.5 * (static_cast<double>(t1.vocab().count(w)) / totals[p] +
                              static_cast<double>(t2.vocab().count(w)) / totals[p + 1]);
      out.push_back({w, p, semantic_change(w, n1, n2, al), f});
    }
  }
  return out;
}

std::vector<Corpus> control_condition(std::span<const Corpus> corpora, std::size_t batches,
                                      std::uint64_t seed) {
  if (corpora.empty()) throw UsageError("control condition needs at least one corpus");
  if (batches < 2) throw UsageError("control condition needs at least 2 batches");
  Corpus pooled;
  for (const auto& c : corpora)
    pooled.documents.insert(pooled.documents.end(), c.documents.begin(), c.documents.end());
  const std::size_t n = pooled.documents.size();
  if (n < batches)
    throw DataError("only " + std::to_string(n) + " documents for " + std::to_string(batches) +
                    " batches");
  Corpus shuffled = sample(pooled, {SamplingKind::shuffled, seed});
  std::vector<Corpus> out(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t begin = n * b / batches, end = n * (b + 1) / batches;
    out[b].documents.assign(std::make_move_iterator(shuffled.documents.begin() + begin),
                            std::make_move_iterator(shuffled.documents.begin() + end));
  }
  return out;
}

std::vector<EmbeddingSpace> train_epoch_spaces(std::span<const Corpus> epochs,
                                               const ConformityConfig& config) {
  if (config.fold < 1) throw UsageError("averaging fold must be at least 1");
  std::vector<EmbeddingSpace> out;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    std::vector<EmbeddingSpace> runs;
    for (std::size_t k = 0; k < config.fold; ++k) {
      const std::uint64_t seed = derive_seed(config.seed, e * config.fold + k);
      SgnsConfig trainer = config.trainer;
      trainer.seed = seed;
      runs.push_back(normalize(train(sample(epochs[e], {SamplingKind::shuffled, seed}), trainer)));
    }
    // Averaging sums counts over the runs; every run saw the same epoch.
    std::unordered_map<std::string, std::uint64_t> counts;
    const Vocabulary& v = runs.front().vocab();
    for (std::size_t i = 0; i < v.size(); ++i) counts.emplace(v.word(i), v.count(i));
    const EmbeddingSpace avg = aligned_average_tree(runs);
    out.emplace_back(avg.vocab().with_frequencies(counts), avg.matrix(), avg.normalized());
  }
  return out;
}

FrequencyEffectResult conformity_condition(std::span<const Corpus> epochs,
                                           const ConformityConfig& config) {
  const auto spaces = train_epoch_spaces(epochs, config);
  return frequency_effect(change_observations(spaces, config.min_count));
}

}  // namespace embedstab
