#include <gtest/gtest.h>

#include "ceal/run_config.hpp"

namespace ceal {
namespace {

TEST(RunConfig, DefaultsFollowProtocol) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.mc.t_steps, 10u);
  EXPECT_EQ(c.mc.dropout_p, 0.5);
  EXPECT_EQ(c.quotas.no_detection, 10u);
  EXPECT_EQ(c.quotas.most_uncertain, 10u);
  EXPECT_EQ(c.quotas.random, 15u);
  EXPECT_EQ(c.iterations, 9u);
  EXPECT_EQ(c.train.epochs, 2u);
  EXPECT_EQ(c.split.labeled, 600u);
  EXPECT_EQ(c.split.unlabeled, 1000u);
  EXPECT_EQ(c.split.test, 400u);
  EXPECT_EQ(c.seed, 42u);
}

TEST(RunConfig, ParsesValuesAndComments) {
  const auto c = parse_config(
      "# desk scale\n"
      "split_labeled = 60\n"
      "t_steps=4   # fewer passes\n"
      "\n"
      "dropout_p=0.25\n"
      "strategy=random\n"
      "warm_start=false\n"
      "rank_by=normalized\n"
      "seed=18446744073709551615\n");
  EXPECT_EQ(c.split.labeled, 60u);
  EXPECT_EQ(c.mc.t_steps, 4u);
  EXPECT_EQ(c.mc.dropout_p, 0.25);
  EXPECT_EQ(c.strategy, Strategy::kRandom);
  EXPECT_FALSE(c.warm_start);
  EXPECT_EQ(c.rank_by, ScoreKind::kNormalized);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
}

TEST(RunConfig, RejectsBadInput) {
  EXPECT_THROW(parse_config("no_such_key=1\n"), ConfigError);
  EXPECT_THROW(parse_config("seed=1\nseed=2\n"), ConfigError);
  EXPECT_THROW(parse_config("t_steps=abc\n"), ConfigError);
  EXPECT_THROW(parse_config("t_steps=-3\n"), ConfigError);
  EXPECT_THROW(parse_config("t_steps\n"), ConfigError);
  EXPECT_THROW(parse_config("t_steps=1\n"), ConfigError);
  EXPECT_THROW(parse_config("dropout_p=1\n"), ConfigError);
  EXPECT_THROW(parse_config("iterations=0\n"), ConfigError);
  EXPECT_THROW(parse_config("strategy=greedy\n"), ConfigError);
  try {
    parse_config("seed=1\n\nbogus=2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, FormatRoundTrip) {
  RunConfig c;
  c.split = {7, 8, 9};
  c.mc = {3, 0.1};
  c.quotas = {1, 2, 3};
  c.pseudo = {0.3, 0.01, 0.05};
  c.train.learning_rate = 0.0123456789;
  c.train.augment = false;
  c.iterations = 2;
  c.binarize_threshold = 0.4;
  c.seed = 99;
  c.warm_start = false;
  c.strategy = Strategy::kRandom;
  c.record_timing = true;
  c.threads = 3;
  const auto text = format_config(c);
  EXPECT_EQ(format_config(parse_config(text)), text);
  const auto back = parse_config(text);
  EXPECT_EQ(back.train.learning_rate, c.train.learning_rate);
  EXPECT_EQ(back.pseudo.floor, 0.05);
  EXPECT_EQ(back.strategy, Strategy::kRandom);
}

TEST(RunConfig, ReferenceListsEveryKey) {
  const auto ref = config_reference();
  for (const char* key : {"t_steps", "dropout_p", "quota_no_detection", "quota_uncertain", "quota_random",
                          "iterations", "epochs", "seed", "pseudo_delta0", "warm_start"})
    EXPECT_NE(ref.find(key), std::string::npos) << key;
}

}  // namespace
}  // namespace ceal
