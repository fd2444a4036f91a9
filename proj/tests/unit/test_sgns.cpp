#include "embedstab/error.hpp"
#include "embedstab/sgns.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace embedstab;

namespace {

Corpus tokens(const std::string& line) { return Corpus{{tokenize(line)}}; }

SgnsConfig small_config() {
  SgnsConfig c;
  c.dim = 10;
  c.window = 3;
  c.epochs = 3;
  c.min_count = 1;
  c.subsample_t = 1e-3;
  c.seed = 5;
  return c;
}

double mean_cosine(const EmbeddingSpace& s, const std::vector<std::string>& xs,
                   const std::vector<std::string>& ys, bool skip_same) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      if (skip_same && x == y) continue;
      sum += cosine(s, x, y);
      ++n;
    }
  return sum / n;
}

}  // namespace

TEST(BuildVocab, CountsAndOrder) {
  const auto v = build_vocab(tokens("a a a b"), 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.word(0), "a");
  EXPECT_EQ(v.count(0), 3u);
  const auto all = build_vocab(tokens("c b b a c c"), 1);
  EXPECT_EQ(all.words(), (std::vector<std::string>{"c", "b", "a"}));
}

TEST(BuildVocab, AgreesWithHashMapOracle) {
  const auto c = testkit::topic_corpus(300, 3, 40, 12, 17);
  std::map<std::string, std::uint64_t> oracle;
  for (const auto& d : c.documents)
    for (const auto& w : d) ++oracle[w];
  const auto v = build_vocab(c, 3);
  std::size_t kept = 0;
  for (const auto& [w, n] : oracle) {
    if (n < 3) {
      EXPECT_FALSE(v.contains(w));
      continue;
    }
    ++kept;
    EXPECT_EQ(v.count(w), n);
  }
  EXPECT_EQ(v.size(), kept);
}

TEST(Subsample, Formula) {
  EXPECT_DOUBLE_EQ(subsample_probability(1e-5, 1e-5), 0.0);
  EXPECT_DOUBLE_EQ(subsample_probability(4e-5, 1e-5), 0.5);
  EXPECT_NEAR(subsample_probability(1e-3, 1e-5), 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(subsample_probability(1e-7, 1e-5), 0.0);
  EXPECT_THROW(subsample_probability(0.0, 1e-5), UsageError);
}

TEST(NoiseDistribution, ThreeQuarterPower) {
  const auto p = noise_distribution(Vocabulary({"a", "b"}, {16, 1}));
  EXPECT_NEAR(p[0], 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 9.0, 1e-15);
  const auto u = noise_distribution(Vocabulary({"a", "b", "c"}, {7, 7, 7}));
  for (double x : u) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
  EXPECT_THROW(noise_distribution(Vocabulary({"a"})), DataError);
}

TEST(NoiseDistribution, SumsToOne) {
  Rng rng(3);
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  for (int i = 0; i < 1000; ++i) {
    words.push_back("w" + std::to_string(i));
    counts.push_back(1 + rng.below(100000));
  }
  const auto p = noise_distribution(Vocabulary(words, counts));
  double s = 0.0;
  for (double x : p) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  const NoiseTable t(p);
  EXPECT_NEAR(t.cdf().back(), 1.0, 1e-12);
}

TEST(NoiseTable, EmpiricalFrequenciesWithinThreeStandardErrors) {
  const std::vector<double> p{0.5, 0.25, 0.15, 0.1};
  const NoiseTable t(p);
  Rng rng(77);
  const std::size_t draws = 1000000;
  std::vector<std::size_t> hits(p.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) ++hits[t.sample(rng)];
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double se = std::sqrt(p[i] * (1 - p[i]) / draws);
    EXPECT_NEAR(static_cast<double>(hits[i]) / draws, p[i], 3 * se);
  }
}

TEST(Sigmoid, Values) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
  EXPECT_GT(sigmoid(40.0), 0.999999);
  EXPECT_GT(sigmoid(-40.0), 0.0);
}

TEST(SgnsStep, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = testkit::sgns_gradient_check(seed);
    EXPECT_EQ(g.parameters, 5u * 5u);
    EXPECT_LT(g.max_relative_error, 1e-5) << "seed " << seed;
  }
}

TEST(SgnsStep, ZeroLearningRateLeavesStateUnchanged) {
  Rng rng(1);
  auto s = init_state(Vocabulary({"a", "b", "c"}, {3, 2, 1}), 4, rng);
  s.output.setRandom();
  const auto before = s;
  sgns_step(s, 0, 1, 0.0, 2, rng);
  EXPECT_EQ(s.input, before.input);
  EXPECT_EQ(s.output, before.output);
}

TEST(SgnsStep, SmallStepIncreasesTargetContextDot) {
  Rng rng(2);
  auto s = init_state(Vocabulary({"a", "b", "c", "d"}, {4, 3, 2, 1}), 5, rng);
  s.output.setRandom();
  const double before = s.output.row(1).dot(s.input.row(0));
  const std::vector<std::size_t> neg{2, 3};
  sgns_step(s, 0, 1, neg, 1e-3);
  EXPECT_GT(s.output.row(1).dot(s.input.row(0)), before);
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  auto cfg = small_config();
  cfg.epochs = 0;
  const auto c = testkit::topic_corpus(20, 2, 5, 5, 1);
  const auto s = train(c, cfg);
  const double half = 0.5 / cfg.dim;
  EXPECT_LE(s.matrix().cwiseAbs().maxCoeff(), half);
  Rng rng(cfg.seed);
  const auto init = init_state(build_vocab(c, 1), cfg.dim, rng);
  EXPECT_EQ(s.matrix(), init.input);
}

TEST(Train, DeterministicForSeed) {
  const auto c = testkit::topic_corpus(200, 2, 10, 8, 4);
  const auto a = train(c, small_config());
  const auto b = train(c, small_config());
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_EQ(a.vocab().words(), b.vocab().words());
  auto other = small_config();
  other.seed = 6;
  EXPECT_NE(train(c, other).matrix(), a.matrix());
}

TEST(Train, EmptyVocabularyIsAnError) {
  auto cfg = small_config();
  cfg.min_count = 1000;
  EXPECT_THROW(train(testkit::topic_corpus(5, 1, 3, 3, 1), cfg), DataError);
}

TEST(Train, SeparatesTopics) {
  const auto c = testkit::topic_corpus(2000, 2, 20, 10, 8);
  auto cfg = small_config();
  cfg.dim = 20;
  cfg.epochs = 5;
  const auto s = train(c, cfg);
  std::vector<std::string> t0, t1;
  for (int i = 0; i < 20; ++i) {
    t0.push_back("t0_" + std::to_string(i));
    t1.push_back("t1_" + std::to_string(i));
  }
  const double within = 0.5 * (mean_cosine(s, t0, t0, true) + mean_cosine(s, t1, t1, true));
  const double across = mean_cosine(s, t0, t1, false);
  EXPECT_GE(within - across, 0.2) << "within " << within << " across " << across;
}

TEST(SgnsConfig, Validation) {
  SgnsConfig c;
  c.initial_lr = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = SgnsConfig{};
  c.subsample_t = 1.5;
  EXPECT_THROW(c.validate(), UsageError);
}
