#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ceal/uncertainty.hpp"
#include "oracles.hpp"

namespace ceal {
namespace {

ProbMap single(double v) { return ProbMap(1, 1, std::vector<double>{v}); }

TEST(Accumulator, FinalizeNeedsTwoUpdates) {
  VarianceAccumulator acc(2, 2);
  EXPECT_THROW(acc.finalize(), StateError);
  acc.update(ProbMap(2, 2, 0.3));
  EXPECT_THROW(acc.finalize(), StateError);
  acc.update(ProbMap(2, 2, 0.3));
  const auto r = acc.finalize();
  EXPECT_EQ(r.mean.width(), 2u);
  EXPECT_EQ(r.variance.height(), 2u);
}

TEST(Accumulator, TwoPointStep) {
  VarianceAccumulator acc(1, 1);
  acc.update(single(0.0));
  acc.update(single(1.0));
  EXPECT_EQ(acc.mean()[0], 0.5);
  EXPECT_EQ(acc.m2()[0], 0.5);
  EXPECT_EQ(acc.finalize().variance[0], 0.25);
}

TEST(Accumulator, IdenticalPassesGiveExactZero) {
  VarianceAccumulator acc(1, 1);
  for (int i = 0; i < 7; ++i) acc.update(single(0.37));
  EXPECT_EQ(acc.m2()[0], 0.0);
  const auto r = acc.finalize();
  EXPECT_EQ(r.variance[0], 0.0);
  EXPECT_EQ(r.mean[0], 0.37);
}

TEST(Accumulator, DimensionMismatch) {
  VarianceAccumulator acc(2, 2);
  EXPECT_THROW(acc.update(ProbMap(2, 3)), ArgumentError);
}

TEST(Accumulator, MatchesTwoPassOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = 2 + rng.below(99);
    std::vector<ProbMap> passes;
    for (std::size_t k = 0; k < t; ++k) passes.push_back(testing::random_prob_map(3, 2, rng));
    VarianceAccumulator acc(3, 2);
    for (const auto& p : passes) acc.update(p);
    const auto r = acc.finalize();
    for (std::size_t i = 0; i < 6; ++i) {
      std::vector<double> xs;
      for (const auto& p : passes) xs.push_back(p[i]);
      ASSERT_NEAR(r.variance[i], testing::two_pass_variance(xs), 1e-10);
      ASSERT_LE(r.variance[i], 0.25);
    }
  }
}

TEST(Accumulator, OrderIndependent) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ProbMap> passes;
    for (int k = 0; k < 10; ++k) passes.push_back(testing::random_prob_map(4, 4, rng));
    VarianceAccumulator a(4, 4);
    for (const auto& p : passes) a.update(p);
    rng.shuffle(std::span<ProbMap>(passes));
    VarianceAccumulator b(4, 4);
    for (const auto& p : passes) b.update(p);
    const auto ra = a.finalize();
    const auto rb = b.finalize();
    for (std::size_t i = 0; i < 16; ++i) {
      ASSERT_NEAR(ra.variance[i], rb.variance[i], 1e-12);
      ASSERT_NEAR(ra.mean[i], rb.mean[i], 1e-12);
    }
  }
}

TEST(Accumulator, MergeEqualsSequentialUpdates) {
  Rng rng(29);
  std::vector<ProbMap> passes;
  for (int k = 0; k < 9; ++k) passes.push_back(testing::random_prob_map(3, 3, rng));
  VarianceAccumulator all(3, 3);
  VarianceAccumulator left(3, 3);
  VarianceAccumulator right(3, 3);
  for (int k = 0; k < 9; ++k) {
    all.update(passes[k]);
    (k < 4 ? left : right).update(passes[k]);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), 9u);
  const auto a = all.finalize();
  const auto b = left.finalize();
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(a.variance[i], b.variance[i], 1e-12);
}

TEST(McConfig, Validation) {
  EXPECT_THROW((McConfig{1, 0.5}.validate()), ArgumentError);
  EXPECT_THROW((McConfig{10, 0.0}.validate()), ArgumentError);
  EXPECT_THROW((McConfig{10, 1.0}.validate()), ArgumentError);
  const McConfig defaults;
  EXPECT_EQ(defaults.t_steps, 10u);
  EXPECT_EQ(defaults.dropout_p, 0.5);
}

TEST(McPredict, BiasOnlyModelHasZeroVariance) {
  RefPredictor::Weights w{};
  w[kFeatureCount] = 1.3;
  const RefPredictor model(w, 0.5);
  Rng img_rng(1);
  const auto img = testing::random_image(6, 5, img_rng);
  for (std::size_t t : {2u, 10u, 33u}) {
    Rng rng(4);
    const auto r = mc_predict(model, img, McConfig{t, 0.5}, rng);
    for (const double v : r.variance.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(McPredict, DeterministicGivenSeedAndBounded) {
  RefPredictor::Weights w{};
  for (std::size_t f = 0; f <= kFeatureCount; ++f) w[f] = 0.7 * (f % 3) - 0.6;
  const RefPredictor model(w, 0.5);
  Rng img_rng(2);
  const auto img = testing::random_image(8, 8, img_rng);
  Rng a(77);
  Rng b(77);
  const auto ra = mc_predict(model, img, McConfig{}, a);
  const auto rb = mc_predict(model, img, McConfig{}, b);
  EXPECT_EQ(ra.variance, rb.variance);
  EXPECT_EQ(ra.mean, rb.mean);
  const auto max_var = *std::max_element(ra.variance.values().begin(), ra.variance.values().end());
  EXPECT_GT(max_var, 0.0);
  EXPECT_LE(max_var, 0.25);
}

}  // namespace
}  // namespace ceal
