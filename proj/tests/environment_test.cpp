#include "relbandit/environment.hpp"
#include "relbandit/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace relbandit {
namespace {

constexpr int kDraws = 100000;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

SimulatedUser user2(double a, double b, double sigma = 0.1) { return {0, Eigen::Vector2d(a, b), sigma}; }

TEST(SampleClick, DegenerateProbabilities) {
  Rng rng(1);
  const auto u = user2(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_click(u, Eigen::Vector2d(0, 1), rng), 1);
    EXPECT_EQ(sample_click(u, Eigen::Vector2d(1, 0), rng), 0);
  }
}

TEST(SampleClick, EmpiricalMeanMatchesProbability) {
  Rng rng(2);
  const auto u = user2(0.3, 0.0);
  long hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += sample_click(u, Eigen::Vector2d(1, 0), rng);
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.3, 0.005);
}

TEST(SampleClick, ClampsWithinToleranceAndRejectsBeyond) {
  Rng rng(3);
  const auto u = user2(1.0 + 5e-10, 0.0);
  EXPECT_EQ(sample_click(u, Eigen::Vector2d(1, 0), rng), 1);
  EXPECT_THROW(sample_click(user2(1.01, 0.0), Eigen::Vector2d(1, 0), rng), ModelViolation);
  EXPECT_THROW(sample_click(user2(-0.01, 0.0), Eigen::Vector2d(1, 0), rng), ModelViolation);
}

TEST(SampleAbsoluteFeedback, Examples) {
  Rng rng(4);
  const auto u = user2(0.6, 0.4);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_absolute_feedback(u, Eigen::Vector2d(1, 1), rng), 1);
    EXPECT_EQ(sample_absolute_feedback(u, Eigen::Vector2d(0, 0), rng), 0);
  }
  long hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += sample_absolute_feedback(u, Eigen::Vector2d(1, 0), rng);
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.6, 0.005);
}

TEST(SampleRelativeFeedback, EqualFeaturesGiveHalf) {
  Rng rng(5);
  const auto u = user2(0.3, 0.5);
  long hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += sample_relative_feedback(u, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1), rng);
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.5, 0.005);
}

TEST(SampleRelativeFeedback, NoiselessLimitIsDeterministic) {
  Rng rng(6);
  const auto u = user2(0.3, 0.5, 0.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_relative_feedback(u, Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 1), rng), 1);
    EXPECT_EQ(sample_relative_feedback(u, Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1), rng), 0);
    EXPECT_EQ(sample_relative_feedback(u, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1), rng), 0);  // tie -> 0
  }
}

TEST(SampleRelativeFeedback, MatchesNormalCdfOracle) {
  // gap = (x1 - x2)ᵀθ* = 0.1, σ_g = 0.1 -> Φ(1/√2) ≈ 0.7602.
  Rng rng(7);
  const auto u = user2(1.0, 0.0, 0.1);
  long hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += sample_relative_feedback(u, Eigen::Vector2d(0.6, 1), Eigen::Vector2d(0.5, 1), rng);
  const double oracle = normal_cdf(0.1 / (std::sqrt(2.0) * 0.1));
  EXPECT_NEAR(oracle, 0.7602, 5e-5);
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, oracle, 0.005);
}

TEST(SampleRelativeFeedback, AntiSymmetricInDistribution) {
  Rng a(8), b(9);
  const auto u = user2(0.4, 0.2, 0.1);
  const Eigen::Vector2d x1(0.7, 1), x2(0.55, 1);
  long forward = 0, backward = 0;
  for (int i = 0; i < kDraws; ++i) {
    forward += sample_relative_feedback(u, x1, x2, a);
    backward += 1 - sample_relative_feedback(u, x2, x1, b);
  }
  // Two independent binomial proportions; 4.5 combined standard errors.
  const double p = static_cast<double>(forward) / kDraws;
  EXPECT_NEAR(p, static_cast<double>(backward) / kDraws, 4.5 * std::sqrt(2 * p * (1 - p) / kDraws));
}

// Independent oracle: ⌊ln t⌋ = number of k ≥ 1 with e^k ≤ t.
std::int64_t floor_ln_oracle(std::int64_t t) {
  std::int64_t k = 0;
  while (static_cast<long double>(t) >= std::exp(static_cast<long double>(k + 1))) ++k;
  return k;
}

TEST(ConversationBudget, Examples) {
  EXPECT_EQ(conversation_budget(1), 0);
  EXPECT_EQ(conversation_budget(2), 0);
  EXPECT_EQ(conversation_budget(3), 5);
  EXPECT_EQ(conversation_budget(7), 0);
  EXPECT_EQ(conversation_budget(8), 5);  // e² ≈ 7.39
  EXPECT_THROW(conversation_budget(0), std::invalid_argument);
}

TEST(ConversationBudget, CumulativeSumEqualsFiveFloorLn) {
  std::int64_t sum = 0;
  for (std::int64_t t = 1; t <= 1000000; ++t) {
    sum += conversation_budget(t);
    if (t < 3000 || t % 997 == 0 || t == 1000000) ASSERT_EQ(sum, 5 * floor_ln_oracle(t)) << "t=" << t;
    ASSERT_GE(conversation_budget(t), 0);
  }
}

TEST(ConversationBudget, OtherLogBase) {
  EXPECT_EQ(cumulative_budget(1000, 5.0, 10.0), 15);
  EXPECT_EQ(cumulative_budget(999, 5.0, 10.0), 10);
  EXPECT_EQ(conversation_budget(1000, 5.0, 10.0), 5);
  EXPECT_EQ(conversation_budget(16, 1.0, 2.0), 1);
}

TEST(SampleCandidates, FullSetAndErrors) {
  Rng rng(10);
  const auto all = sample_candidates(7, 7, rng);
  EXPECT_EQ(all, (std::vector<ArmId>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(sample_candidates(3, 4, rng), std::invalid_argument);
  EXPECT_THROW(sample_candidates(3, 0, rng), std::invalid_argument);
}

TEST(SampleCandidates, NoDuplicatesAndDeterministic) {
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    const auto s = sample_candidates(100, 20, a);
    EXPECT_EQ(s, sample_candidates(100, 20, b));
    EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
    EXPECT_LT(s.back(), 100u);
  }
}

TEST(SampleCandidates, SingleDrawIsUniform) {
  Rng rng(11);
  const std::size_t n = 10;
  std::vector<long> counts(n, 0);
  for (int i = 0; i < kDraws; ++i) ++counts[sample_candidates(n, 1, rng)[0]];
  const double p = 1.0 / n;
  const double sd = std::sqrt(kDraws * p * (1 - p));
  for (long c : counts) EXPECT_NEAR(static_cast<double>(c), kDraws * p, 3 * sd);
}

}  // namespace
}  // namespace relbandit
