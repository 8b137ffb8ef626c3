#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "ceal/orchestrator.hpp"

namespace ceal {
namespace {

Dataset desk_dataset(std::size_t n = 200) {
  SynthParams p;
  p.image_size = 16;
  p.min_axis = 2;
  p.max_axis = 5;
  return make_synthetic_dataset(n, p, 3);
}

RunConfig desk_config() {
  RunConfig c;
  c.split = {60, 100, 40};
  c.mc.t_steps = 4;
  c.iterations = 2;
  c.train.max_pixels_per_image = 128;
  c.pseudo = {30.0, 5.0, 10.0};
  c.seed = 5;
  return c;
}

std::unique_ptr<StochasticPredictor> ref_factory(const RunConfig& c) {
  return std::make_unique<RefPredictor>(c.mc.dropout_p);
}

std::string csv(const RunLog& log) {
  std::ostringstream out;
  write_run_log_csv(out, log);
  return out.str();
}

template <typename M>
std::set<SampleId> keys(const M& m) {
  std::set<SampleId> s;
  for (const auto& kv : m) s.insert(kv.first);
  return s;
}

TEST(Run, LabeledSetGrowsByQuotaSum) {
  const auto ds = desk_dataset();
  const auto log = run(desk_config(), ds, ref_factory);
  ASSERT_EQ(log.records.size(), 3u);
  EXPECT_EQ(log.records[0].iteration, 0u);
  EXPECT_EQ(log.records[0].n_labeled, 60u);
  for (std::size_t t = 1; t < log.records.size(); ++t) {
    const auto& r = log.records[t];
    EXPECT_EQ(r.iteration, t);
    EXPECT_EQ(r.n_labeled, 60u + 35u * t);
    EXPECT_EQ(r.oracle_no_detect + r.oracle_uncertain + r.oracle_random, 35u);
    EXPECT_EQ(r.regions[0] + r.regions[1] + r.regions[2] + r.regions[3], 100u - 35u * (t - 1));
  }
  EXPECT_EQ(log.oracle_queries, 70u);
}

TEST(Run, SameSeedByteIdenticalLog) {
  const auto ds = desk_dataset();
  auto cfg = desk_config();
  const auto a = csv(run(cfg, ds, ref_factory));
  const auto b = csv(run(cfg, ds, ref_factory));
  EXPECT_EQ(a, b);
  cfg.threads = 1;
  EXPECT_EQ(csv(run(cfg, ds, ref_factory)), a);
  cfg.seed = 6;
  EXPECT_NE(csv(run(cfg, ds, ref_factory)), a);
}

TEST(Run, RandomBaselineSameSchemaNoPseudo) {
  const auto ds = desk_dataset();
  auto cfg = desk_config();
  cfg.strategy = Strategy::kRandom;
  const auto log = run(cfg, ds, ref_factory);
  for (std::size_t t = 1; t < log.records.size(); ++t) {
    EXPECT_EQ(log.records[t].oracle_random, 35u);
    EXPECT_EQ(log.records[t].n_pseudo, 0u);
  }
  EXPECT_EQ(csv(log).substr(0, csv(log).find('\n')), kRunLogHeader);
}

TEST(Run, ZeroQuotasOnlyRetrain) {
  const auto ds = desk_dataset();
  auto cfg = desk_config();
  cfg.quotas = {0, 0, 0};
  cfg.pseudo = {0.0, 0.0, 0.0};
  cfg.iterations = 1;
  const auto log = run(cfg, ds, ref_factory);
  EXPECT_EQ(log.records[1].n_labeled, 60u);
  EXPECT_EQ(log.records[1].n_pseudo, 0u);
  EXPECT_EQ(log.oracle_queries, 0u);
}

TEST(Run, LogCsvRoundTrip) {
  const auto ds = desk_dataset();
  const auto log = run(desk_config(), ds, ref_factory);
  std::istringstream in(csv(log));
  EXPECT_EQ(read_run_log_csv(in), log.records);
  std::istringstream bad("iteration,n_labeled\n1,2\n");
  EXPECT_THROW(read_run_log_csv(bad), FormatError);
}

TEST(Run, TooSmallDatasetFailsAtIterationZero) {
  const auto ds = desk_dataset(50);
  try {
    run(desk_config(), ds, ref_factory);
    FAIL();
  } catch (const IterationError& e) {
    EXPECT_EQ(e.iteration(), 0u);
  }
}

TEST(Iteration, NeverTrainsOnTestAndRespectsBudget) {
  const auto ds = desk_dataset();
  const auto cfg = desk_config();
  Rng rng(1);
  auto state = init_pools(ds, cfg.split, rng);
  std::unique_ptr<StochasticPredictor> model = ref_factory(cfg);
  Rng train_rng(2);
  model->train(training_set(state), cfg.train, train_rng);
  const auto test_ids = keys(state.test());
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    auto out = run_iteration(state, *model, cfg, t);
    for (const auto id : out.audit.trained_on) ASSERT_FALSE(test_ids.count(id));
    // Pseudo-labeled samples are trained on but remain unlabeled.
    for (const auto id : out.audit.pseudo) {
      EXPECT_TRUE(out.state.unlabeled().count(id));
      EXPECT_TRUE(std::count(out.audit.trained_on.begin(), out.audit.trained_on.end(), id));
    }
    EXPECT_LE(out.state.oracle_queries(), (t + 1) * cfg.quotas.total());
    EXPECT_EQ(keys(out.state.test()), test_ids);
    state = std::move(out.state);
    model = std::move(out.predictor);
  }
}

// Succeeds until told to fail, so a failure lands mid-iteration after
// selection has been applied to the working copy.
class FailingPredictor final : public StochasticPredictor {
 public:
  explicit FailingPredictor(bool fail_train) : fail_train_(fail_train) {}
  void train(std::span<const TrainingExample>, const TrainConfig&, Rng&) override {
    if (fail_train_) throw std::runtime_error("training blew up");
  }
  ProbMap predict_deterministic(const GrayImage& img) const override { return ProbMap(img.width(), img.height(), 0.2); }
  ProbMap predict_stochastic(const GrayImage& img, double, Rng& rng) const override {
    ProbMap p(img.width(), img.height());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform();
    return p;
  }
  void reinitialize() override {}
  std::unique_ptr<StochasticPredictor> clone() const override { return std::make_unique<FailingPredictor>(*this); }
  bool fail_train_;
};

TEST(Iteration, FailureLeavesStateUntouched) {
  const auto ds = desk_dataset();
  const auto cfg = desk_config();
  Rng rng(1);
  const auto state = init_pools(ds, cfg.split, rng);
  const auto labeled = keys(state.labeled());
  const auto unlabeled = keys(state.unlabeled());
  FailingPredictor bad(true);
  EXPECT_THROW(run_iteration(state, bad, cfg, 0), std::runtime_error);
  EXPECT_EQ(keys(state.labeled()), labeled);
  EXPECT_EQ(keys(state.unlabeled()), unlabeled);
  EXPECT_EQ(state.oracle_queries(), 0u);
  EXPECT_EQ(state.pseudo_count(), 0u);
  state.check_invariants();

  FailingPredictor good(false);
  const auto out = run_iteration(state, good, cfg, 0);
  EXPECT_EQ(out.state.labeled().size(), 95u);
  EXPECT_EQ(state.labeled().size(), 60u);
}

TEST(Run, FailureCarriesIterationIndex) {
  const auto ds = desk_dataset();
  auto cfg = desk_config();
  int calls = 0;
  // Train succeeds for the initial model, fails on the first iteration.
  class Flaky final : public StochasticPredictor {
   public:
    explicit Flaky(int* calls) : calls_(calls) {}
    void train(std::span<const TrainingExample>, const TrainConfig&, Rng&) override {
      if ((*calls_)++ > 0) throw std::runtime_error("late failure");
    }
    ProbMap predict_deterministic(const GrayImage& img) const override { return ProbMap(img.width(), img.height(), 0.7); }
    ProbMap predict_stochastic(const GrayImage& img, double, Rng&) const override { return predict_deterministic(img); }
    void reinitialize() override {}
    std::unique_ptr<StochasticPredictor> clone() const override { return std::make_unique<Flaky>(*this); }
    int* calls_;
  };
  try {
    run(cfg, ds, [&](const RunConfig&) { return std::make_unique<Flaky>(&calls); });
    FAIL();
  } catch (const IterationError& e) {
    EXPECT_EQ(e.iteration(), 1u);
  }
}

TEST(ScorePool, IndependentOfThreadCount) {
  const auto ds = desk_dataset();
  auto cfg = desk_config();
  Rng rng(1);
  const auto state = init_pools(ds, cfg.split, rng);
  RefPredictor model(0.5);
  Rng trng(3);
  model.train(training_set(state), cfg.train, trng);
  cfg.threads = 1;
  const auto a = score_pool(state, model, cfg, 4);
  cfg.threads = 4;
  const auto b = score_pool(state, model, cfg, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].score.raw, b[i].score.raw);
    EXPECT_EQ(*a[i].predicted, *b[i].predicted);
  }
}

}  // namespace
}  // namespace ceal
