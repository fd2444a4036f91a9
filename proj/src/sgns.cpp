#include "embedstab/sgns.hpp"

#include "embedstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace embedstab {

namespace {

constexpr double kLrFloorFraction = 1e-4;

// Per-step scratch shared by the public step and the training loop.
struct StepScratch {
  std::vector<double> coeff;
  std::vector<double> neu1e;
};

// Applies one ascent step; `words[0]` is the context word with label 1, the
// rest are noise words with label 0.
void apply_step(double* target_row, Matrix& output, std::span<const std::size_t> words, double lr,
                int dim, StepScratch& scratch) {
  scratch.coeff.resize(words.size());
  scratch.neu1e.assign(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t j = 0; j < words.size(); ++j) {
    const double* u = output.data() + words[j] * static_cast<std::size_t>(dim);
    double x = 0.0;
    for (int k = 0; k < dim; ++k) x += u[k] * target_row[k];
    // d/dx log s(x) = s(-x); d/dx log s(-x) = -s(x)
    scratch.coeff[j] = j == 0 ? sigmoid(-x) : -sigmoid(x);
  }
  for (std::size_t j = 0; j < words.size(); ++j) {
    const double* u = output.data() + words[j] * static_cast<std::size_t>(dim);
    const double g = scratch.coeff[j];
    for (int k = 0; k < dim; ++k) scratch.neu1e[static_cast<std::size_t>(k)] += g * u[k];
  }
  for (std::size_t j = 0; j < words.size(); ++j) {
    double* u = output.data() + words[j] * static_cast<std::size_t>(dim);
    const double g = lr * scratch.coeff[j];
    for (int k = 0; k < dim; ++k) u[k] += g * target_row[k];
  }
  for (int k = 0; k < dim; ++k) target_row[k] += lr * scratch.neu1e[static_cast<std::size_t>(k)];
}

void draw_negatives(const NoiseTable& noise, std::size_t context, int k, Rng& rng,
                    std::vector<std::size_t>& words) {
  words.resize(static_cast<std::size_t>(k) + 1);
  words[0] = context;
  for (int n = 1; n <= k; ++n) {
    std::size_t w = noise.sample(rng);
    if (w == context) w = noise.sample(rng);
    words[static_cast<std::size_t>(n)] = w;
  }
}

struct Token {
  std::uint32_t word;
  double progress;  // fraction of all training steps done when this token is reached
};

void train_documents(TrainingState& state, const std::vector<std::vector<std::uint32_t>>& docs,
                     std::size_t begin, std::size_t end, const std::vector<double>& discard,
                     const SgnsConfig& cfg, double total_steps, double& processed, Rng& rng) {
  StepScratch scratch;
  std::vector<std::size_t> words;
  std::vector<Token> kept;
  const int dim = cfg.dim;
  for (std::size_t d = begin; d < end; ++d) {
    kept.clear();
    for (std::uint32_t w : docs[d]) {
      const double progress = processed / total_steps;
      processed += 1.0;
      if (discard[w] > 0.0 && rng.uniform() < discard[w]) continue;
      kept.push_back({w, progress});
    }
    const auto n = static_cast<std::ptrdiff_t>(kept.size());
    for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
      const int span =
          cfg.dynamic_window ? 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.window)))
                             : cfg.window;
      const double lr = cfg.initial_lr * (1.0 - kept[static_cast<std::size_t>(pos)].progress *
                                                    (1.0 - kLrFloorFraction));
      const std::size_t target = kept[static_cast<std::size_t>(pos)].word;
      double* target_row = state.input.data() + target * static_cast<std::size_t>(dim);
      for (std::ptrdiff_t c = std::max<std::ptrdiff_t>(0, pos - span);
           c <= std::min<std::ptrdiff_t>(n - 1, pos + span); ++c) {
        if (c == pos) continue;
        draw_negatives(state.noise, kept[static_cast<std::size_t>(c)].word, cfg.negatives, rng,
                       words);
        apply_step(target_row, state.output, words, lr, dim, scratch);
      }
    }
  }
}

}  // namespace

void SgnsConfig::validate() const {
  if (dim < 1) throw UsageError("dim must be positive");
  if (window < 1) throw UsageError("window must be positive");
  if (negatives < 1) throw UsageError("negatives must be positive");
  if (epochs < 0) throw UsageError("epochs must be non-negative");
  if (!(initial_lr > 0.0)) throw UsageError("initial learning rate must be positive");
  if (!(subsample_t > 0.0 && subsample_t <= 1.0))
    throw UsageError("subsampling threshold must lie in (0, 1]");
  if (min_count < 1) throw UsageError("min_count must be positive");
  if (threads < 1) throw UsageError("threads must be positive");
}

NoiseTable::NoiseTable(const std::vector<double>& probabilities) {
  cdf_.resize(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    cdf_[i] = acc;
  }
  if (!cdf_.empty()) {
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
  }
}

std::size_t NoiseTable::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus.documents)
    for (const auto& tok : doc) ++counts[tok];
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= min_count) kept.emplace_back(w, c);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> cs;
  words.reserve(kept.size());
  cs.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(w);
    cs.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(cs));
}

double subsample_probability(double relative_frequency, double t) {
  if (!(relative_frequency > 0.0) || relative_frequency > 1.0)
    throw UsageError("relative frequency must lie in (0, 1]");
  if (relative_frequency <= t) return 0.0;
  return 1.0 - std::sqrt(t / relative_frequency);
}

std::vector<double> noise_distribution(const Vocabulary& vocab) {
  if (!vocab.has_frequencies())
    throw DataError("noise distribution requires word frequencies");
  std::vector<double> p(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    p[i] = std::pow(static_cast<double>(vocab.count(i)), 0.75);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sgns_objective(const TrainingState& state, std::size_t target, std::size_t context,
                      std::span<const std::size_t> negatives) {
  const auto v = state.input.row(static_cast<Eigen::Index>(target));
  double obj = std::log(sigmoid(state.output.row(static_cast<Eigen::Index>(context)).dot(v)));
  for (std::size_t n : negatives)
    obj += std::log(sigmoid(-state.output.row(static_cast<Eigen::Index>(n)).dot(v)));
  return obj;
}

void sgns_step(TrainingState& state, std::size_t target, std::size_t context,
               std::span<const std::size_t> negatives, double lr) {
  const auto v = static_cast<std::size_t>(state.input.rows());
  if (target >= v || context >= v) throw UsageError("word index out of range");
  std::vector<std::size_t> words;
  words.reserve(negatives.size() + 1);
  words.push_back(context);
  for (std::size_t n : negatives) {
    if (n >= v) throw UsageError("word index out of range");
    words.push_back(n);
  }
  StepScratch scratch;
  const int dim = static_cast<int>(state.input.cols());
  apply_step(state.input.data() + target * static_cast<std::size_t>(dim), state.output, words, lr,
             dim, scratch);
}

void sgns_step(TrainingState& state, std::size_t target, std::size_t context, double lr, int k,
               Rng& rng) {
  std::vector<std::size_t> words;
  draw_negatives(state.noise, context, k, rng, words);
  sgns_step(state, target, context, std::span<const std::size_t>(words).subspan(1), lr);
}

TrainingState init_state(const Vocabulary& vocab, int dim, Rng& rng) {
  TrainingState s;
  const auto v = static_cast<Eigen::Index>(vocab.size());
  s.input.resize(v, dim);
  const double half = 0.5 / dim;
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) s.input(i, k) = rng.uniform(-half, half);
  s.output = Matrix::Zero(v, dim);
  if (vocab.has_frequencies()) s.noise = NoiseTable(noise_distribution(vocab));
  return s;
}

EmbeddingSpace train(const Corpus& corpus, const SgnsConfig& config) {
  config.validate();
  Vocabulary vocab = build_vocab(corpus, config.min_count);
  if (vocab.empty())
    throw DataError("empty vocabulary after applying min_count " +
                    std::to_string(config.min_count));

  std::vector<std::vector<std::uint32_t>> docs;
  docs.reserve(corpus.documents.size());
  double total_words = 0.0;
  for (const auto& doc : corpus.documents) {
    std::vector<std::uint32_t> ids;
    ids.reserve(doc.size());
    for (const auto& tok : doc)
      if (auto i = vocab.find(tok)) ids.push_back(static_cast<std::uint32_t>(*i));
    total_words += static_cast<double>(ids.size());
    docs.push_back(std::move(ids));
  }

  std::vector<double> discard(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i)
    discard[i] =
        subsample_probability(static_cast<double>(vocab.count(i)) / total_words, config.subsample_t);

  Rng rng(config.seed);
  TrainingState state = init_state(vocab, config.dim, rng);
  const double total_steps = std::max(1.0, total_words * config.epochs);

  if (config.threads == 1) {
    double processed = 0.0;
    for (int e = 0; e < config.epochs; ++e)
      train_documents(state, docs, 0, docs.size(), discard, config, total_steps, processed, rng);
  } else {
    // Hogwild: threads update the shared matrices without synchronization.
    const auto t = static_cast<std::size_t>(config.threads);
    for (int e = 0; e < config.epochs; ++e) {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < t; ++w) {
        pool.emplace_back([&, w, e] {
          Rng local(derive_seed(config.seed, static_cast<std::uint64_t>(e) * t + w + 1));
          const std::size_t begin = docs.size() * w / t, end = docs.size() * (w + 1) / t;
          double processed = total_words * e;
          for (std::size_t d = 0; d < begin; ++d) processed += static_cast<double>(docs[d].size());
          train_documents(state, docs, begin, end, discard, config, total_steps, processed, local);
        });
      }
      for (auto& th : pool) th.join();
    }
  }
  return EmbeddingSpace(std::move(vocab), std::move(state.input), false);
}

}  // namespace embedstab
