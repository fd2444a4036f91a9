#include "embedstab/error.hpp"
#include "embedstab/gaussian_model.hpp"
#include "embedstab/nn_metrics.hpp"
#include "embedstab/stats.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace embedstab;
using embedstab::testkit::make_profile;

namespace {

StabilityProfile ten_word_profile() {
  return make_profile("t", {0.60, 0.59, 0.585, 0.58, 0.57, 0.55, 0.52, 0.50, 0.45, 0.30},
                      {0.010, 0.012, 0.008, 0.015, 0.010, 0.020, 0.010, 0.010, 0.010, 0.010});
}

std::vector<double> monte_carlo_p_hash2(const StabilityProfile& p, std::size_t samples,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> hits(p.entries.size(), 0.0);
  std::vector<double> x(p.entries.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal(p.entries[i].mu, p.entries[i].sigma);
    std::size_t a = 0, b = 1;
    if (x[b] > x[a]) std::swap(a, b);
    for (std::size_t i = 2; i < x.size(); ++i) {
      if (x[i] > x[a]) {
        b = a;
        a = i;
      } else if (x[i] > x[b]) {
        b = i;
      }
    }
    hits[a] += 1.0;
    hits[b] += 1.0;
  }
  for (double& h : hits) h /= static_cast<double>(samples);
  return hits;
}

}  // namespace

TEST(PairStats, ConstantAndTwoPointSamples) {
  const std::vector<double> c{0.5, 0.5, 0.5};
  const auto a = pair_stats_from_samples("t", "q", c);
  EXPECT_DOUBLE_EQ(a.mu, 0.5);
  EXPECT_EQ(a.sigma, 0.0);
  const std::vector<double> two{0.4, 0.6};
  const auto b = pair_stats_from_samples("t", "q", two);
  EXPECT_DOUBLE_EQ(b.mu, 0.5);
  EXPECT_NEAR(b.sigma, 0.1, 1e-15);
  EXPECT_NEAR(pair_stats_from_samples("t", "q", two, SigmaEstimator::unbiased).sigma,
              0.1 * std::sqrt(2.0), 1e-15);
  EXPECT_THROW(pair_stats_from_samples("t", "q", std::vector<double>{}), DataError);
}

TEST(PairStats, SeededGaussianWithinThreeStandardErrors) {
  Rng rng(123);
  std::vector<double> x(128);
  for (double& v : x) v = rng.normal(0.6, 0.01);
  const auto s = pair_stats_from_samples("t", "q", x);
  EXPECT_NEAR(s.mu, 0.6, 3 * 0.01 / std::sqrt(128.0));
  EXPECT_NEAR(s.sigma, 0.01, 3 * 0.01 / std::sqrt(256.0));
  EXPECT_EQ(s.r, 128u);
}

TEST(PairStats, FromPlantedRunSet) {
  Rng rng(5);
  RunSet runs;
  std::vector<double> planted;
  for (int i = 0; i < 16; ++i) {
    planted.push_back(rng.normal(0.5, 0.05));
    runs.spaces.push_back(testkit::planted_space("t", {"q0", "q1"}, {planted.back(), 0.1}, 6, rng));
  }
  const auto s = estimate_pair_stats(runs, "t", "q0");
  const auto oracle = pair_stats_from_samples("t", "q0", planted);
  EXPECT_NEAR(s.mu, oracle.mu, 1e-12);
  EXPECT_NEAR(s.sigma, oracle.sigma, 1e-12);

  const auto profile = estimate_profile(runs, "t");
  ASSERT_EQ(profile.entries.size(), 2u);
  EXPECT_EQ(profile.find("t"), nullptr);
  EXPECT_NEAR(profile.find("q1")->mu, 0.1, 1e-12);
  EXPECT_NEAR(profile.find("q1")->sigma, 0.0, 1e-9);
  EXPECT_THROW(estimate_pair_stats(runs, "t", "nope"), DataError);
}

TEST(PairStats, InvariantUnderCommonRotation) {
  RunSet runs, rotated;
  Rng rng(9);
  const Matrix r = testkit::random_orthogonal(5, rng);
  for (std::uint64_t i = 0; i < 6; ++i) {
    runs.spaces.push_back(testkit::random_space(12, 5, i));
    rotated.spaces.push_back(transform(runs.spaces.back(), r));
  }
  const auto a = estimate_profile(runs, "w0");
  const auto b = estimate_profile(rotated, "w0");
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_NEAR(a.entries[i].mu, b.entries[i].mu, 1e-12);
    EXPECT_NEAR(a.entries[i].sigma, b.entries[i].sigma, 1e-9);
  }
  EXPECT_NEAR(predict_p_hash1(a, "w3"), predict_p_hash1(b, "w3"), 1e-6);
}

TEST(ProbGreater, SymmetryAndComplement) {
  const PairStatistics a{"t", "a", 0.5, 0.02, 10}, b{"t", "b", 0.5, 0.02, 10};
  EXPECT_DOUBLE_EQ(prob_greater(a, b), 0.5);
  const PairStatistics c{"t", "c", 0.53, 0.01, 10};
  EXPECT_DOUBLE_EQ(prob_greater(a, c) + prob_greater(c, a), 1.0);
}

TEST(ProbGreater, WorkedNumber) {
  const PairStatistics a{"t", "a", 0.489, 0.009, 16}, b{"t", "b", 0.650, 0.010, 16};
  EXPECT_NEAR(prob_greater_argument(a, b), -8.46, 0.01);
  // 30-digit reference from mpmath: erfc(8.46197213276495...) / 2.
  EXPECT_NEAR(prob_greater(a, b) / 2.64422085868593268e-33, 1.0, 1e-9);
}

TEST(ProbGreater, ZeroSigma) {
  const PairStatistics hi{"t", "a", 0.6, 0.0, 1}, lo{"t", "b", 0.5, 0.0, 1};
  EXPECT_EQ(prob_greater(hi, lo), 1.0);
  EXPECT_EQ(prob_greater(lo, hi), 0.0);
  EXPECT_EQ(prob_greater(hi, hi), 0.5);
}

TEST(PredictPHash1, Dominance) {
  const auto p = make_profile("t", {0.8, 0.5}, {0.01, 0.02});
  EXPECT_GE(predict_p_hash1(p, "q0"), 1.0 - 1e-6);
  EXPECT_EQ(predict_p_hash1(p, "q1"), 0.0);
  EXPECT_NEAR(expected_overlap(p, 1), 1.0, 1e-6);
}

TEST(PredictPHash1, ExchangeableCompetitors) {
  const auto p = make_profile("t", {0.5, 0.5}, {0.03, 0.03});
  EXPECT_NEAR(predict_p_hash1(p, "q0"), 0.5, 1e-4);
  EXPECT_NEAR(predict_p_hash1(p, "q1"), 0.5, 1e-4);
  EXPECT_NEAR(expected_overlap(p, 1), 0.5, 1e-4);
}

TEST(PredictPHash1, MatchesMonteCarlo) {
  const auto p = ten_word_profile();
  const auto mc = testkit::monte_carlo_p_hash1(p, 1000000, 42);
  double total = 0.0;
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const double pred = predict_p_hash1(p, p.entries[i].query);
    total += pred;
    EXPECT_NEAR(pred, mc[i], 0.005) << p.entries[i].query;
  }
  EXPECT_NEAR(total, 1.0, 2e-6 + 10 * 1e-5 * 10);
}

TEST(PredictPHash1, UnknownQueryThrows) {
  EXPECT_THROW(predict_p_hash1(ten_word_profile(), "zz"), DataError);
}

TEST(PredictPHash2, TwoQueriesAreBothTopTwo) {
  const auto p = make_profile("t", {0.6, 0.4}, {0.01, 0.05});
  EXPECT_NEAR(predict_p_hash2(p, "q0"), 1.0, 1e-6);
  EXPECT_NEAR(predict_p_hash2(p, "q1"), 1.0, 1e-6);
}

TEST(PredictPHash2, ThreeExchangeable) {
  const auto p = make_profile("t", {0.5, 0.5, 0.5}, {0.02, 0.02, 0.02});
  for (const char* q : {"q0", "q1", "q2"}) EXPECT_NEAR(predict_p_hash2(p, q), 2.0 / 3.0, 1e-3);
}

TEST(PredictPHash2, MatchesMonteCarloAndGrid) {
  const auto p = ten_word_profile();
  const auto mc = monte_carlo_p_hash2(p, 1000000, 7);
  double total = 0.0;
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const auto& q = p.entries[i].query;
    const double p2 = predict_p_hash2(p, q);
    total += p2;
    EXPECT_NEAR(p2, mc[i], 0.01) << q;
    EXPECT_NEAR(p2, testkit::grid_p_hash2(p, i), 1e-4) << q;
    EXPECT_GE(p2 + 1e-9, predict_p_hash1(p, q));
  }
  EXPECT_NEAR(total, 2.0, 1e-3);
}

TEST(ExpectedOverlap, NormalizationForTopTwo) {
  const auto p = make_profile("t", {0.9, 0.8, 0.1}, {0.001, 0.001, 0.001});
  EXPECT_NEAR(expected_overlap(p, 2), 1.0, 1e-6);
  EXPECT_THROW(expected_overlap(p, 3), UsageError);
}

TEST(RelevantEntries, PrunesFarCompetitors) {
  const auto p = make_profile("t", {0.6, 0.59, 0.2, 0.58}, {0.01, 0.01, 0.01, 0.01});
  EXPECT_EQ(relevant_entries(p, 1), (std::vector<std::size_t>{0, 1, 3}));
}

TEST(StructureFactor, ConstantSigmaEqualsExpectedOverlap) {
  const auto p = make_profile("t", {0.5, 0.49, 0.47, 0.4}, {0.02, 0.02, 0.02, 0.02});
  EXPECT_DOUBLE_EQ(structure_factor(p, 1), expected_overlap(p, 1));
  EXPECT_DOUBLE_EQ(structure_factor(p, 2), expected_overlap(p, 2));
  EXPECT_NEAR(structure_factor(p, 1, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(p.mean_sigma(), 0.02, 1e-15);
  EXPECT_THROW(structure_factor(StabilityProfile{}, 1), DataError);
}

TEST(StructureFactor, TracksMeasuredOverlapForMildSigmaVariation) {
  Rng rng(2718);
  std::vector<double> rho, measured;
  for (int t = 0; t < 40; ++t) {
    const double gap = std::exp(rng.uniform(std::log(0.002), std::log(0.05)));
    std::vector<double> mus, sigmas;
    for (int l = 0; l < 20; ++l) {
      mus.push_back(0.6 - gap * l + rng.uniform(-0.3, 0.3) * gap);
      sigmas.push_back(0.02 * rng.uniform(0.8, 1.2));
    }
    const auto p = make_profile("t", mus, sigmas);
    rho.push_back(structure_factor(p, 1));
    // p@1 over 128 sampled runs: fraction of run pairs sharing the top word.
    std::vector<std::size_t> hits(mus.size(), 0);
    for (int r = 0; r < 128; ++r) {
      const auto x = testkit::sample_cosines(p, rng);
      ++hits[static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin())];
    }
    double same = 0.0;
    for (auto h : hits) same += static_cast<double>(h) * (h - 1) / 2.0;
    measured.push_back(same / (128.0 * 127.0 / 2.0));
  }
  EXPECT_GT(pearson(rho, measured), 0.9);
}

TEST(Profiles, SaveLoadRoundTrip) {
  const auto dir = testkit::temp_dir("profiles");
  std::vector<StabilityProfile> ps{ten_word_profile(), make_profile("u", {0.1}, {0.2}, 3)};
  save_profiles(ps, dir / "p.tsv");
  const auto back = load_profiles(dir / "p.tsv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].target, "u");
  ASSERT_EQ(back[0].entries.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back[0].entries[i].query, ps[0].entries[i].query);
    EXPECT_DOUBLE_EQ(back[0].entries[i].mu, ps[0].entries[i].mu);
    EXPECT_DOUBLE_EQ(back[0].entries[i].sigma, ps[0].entries[i].sigma);
    EXPECT_EQ(back[0].entries[i].r, 128u);
  }
}
