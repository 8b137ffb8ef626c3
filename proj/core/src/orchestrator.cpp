#include "ceal/orchestrator.hpp"

#include <chrono>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ceal/distance.hpp"
#include "ceal/uncertainty.hpp"

namespace ceal {
namespace {

enum class Phase : std::uint64_t { kInit = 1, kInitialTrain, kScore, kSelect, kTrain };

std::uint64_t phase_seed(const RunConfig& cfg, std::size_t iteration, Phase phase) {
  return derive_seed(cfg.seed, iteration, static_cast<std::uint64_t>(phase));
}

std::size_t thread_count(const RunConfig& cfg, const StochasticPredictor& predictor, std::size_t jobs) {
  if (!predictor.concurrent_safe()) return 1;
  std::size_t n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

IterationRecord evaluate(const PoolState& pool, const StochasticPredictor& predictor, const RunConfig& cfg,
                         std::span<const RegionRow> regions) {
  const auto m = iteration_metrics(pool, predictor, cfg.binarize_threshold, regions);
  IterationRecord r;
  r.n_labeled = m.n_labeled;
  r.n_pseudo = m.n_pseudo;
  r.mean_test_dice = m.mean_test_dice;
  r.median_test_dice = m.median_test_dice;
  r.regions = m.region_counts;
  return r;
}

}  // namespace

std::vector<SampleRecord> score_pool(const PoolState& pool, const StochasticPredictor& predictor,
                                     const RunConfig& cfg, std::uint64_t stream) {
  std::vector<std::pair<SampleId, const GrayImage*>> jobs;
  jobs.reserve(pool.unlabeled().size());
  for (const auto& [id, entry] : pool.unlabeled()) jobs.emplace_back(id, entry.image.get());

  std::vector<SampleRecord> records(jobs.size());
  auto score_one = [&](std::size_t i) {
    const auto [id, image] = jobs[i];
    Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(Phase::kScore), id));
    const auto mc = mc_predict(predictor, *image, cfg.mc, rng);
    auto predicted = std::make_shared<const BinaryMask>(binarize(mc.mean, cfg.binarize_threshold));
    const auto scored = score_sample(mc.variance, *predicted);
    auto& r = records[i];
    r.id = id;
    r.score = scored.score;
    r.degenerate = scored.degenerate;
    r.predicted_empty = count_foreground(*predicted) == 0;
    r.predicted = std::move(predicted);
  };

  const auto n_threads = thread_count(cfg, predictor, jobs.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) score_one(i);
    return records;
  }
  std::vector<std::exception_ptr> errors(n_threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < jobs.size(); i += n_threads) score_one(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

std::vector<TrainingExample> training_set(const PoolState& pool, std::vector<SampleId>* ids) {
  std::vector<TrainingExample> out;
  if (ids) ids->clear();
  for (const auto& [id, entry] : pool.labeled()) {
    out.push_back({entry.image, entry.mask});
    if (ids) ids->push_back(id);
  }
  for (const auto& [id, entry] : pool.unlabeled()) {
    if (!entry.pseudo) continue;
    out.push_back({entry.image, entry.pseudo});
    if (ids) ids->push_back(id);
  }
  return out;
}

IterationOutcome run_iteration(const PoolState& state, const StochasticPredictor& predictor,
                               const RunConfig& cfg, std::size_t iteration) {
  if (iteration >= cfg.iterations) throw ArgumentError("run_iteration: iteration out of range");
  const auto started = std::chrono::steady_clock::now();
  const std::size_t number = iteration + 1;

  IterationOutcome out{state, predictor.clone(), {}, {}, {}};

  // (1) score the unlabeled pool with the incoming model
  const auto records = score_pool(out.state, *out.predictor, cfg, number);
  out.regions = region_table(records, out.state);

  // (2) select
  SelectionResult selection;
  if (!records.empty()) {
    Rng select_rng(phase_seed(cfg, number, Phase::kSelect));
    selection = cfg.strategy == Strategy::kCeal
                    ? select_complementary(records, cfg.quotas, cfg.pseudo, iteration, select_rng,
                                           cfg.rank_by)
                    : select_random(records, cfg.quotas.total(), select_rng);
  }

  // (3)+(4) oracle labels and pseudo marks
  out.state.apply_selection(selection);
  out.state.check_invariants();

  // (5) retrain on labeled + pseudo-labeled
  const auto examples = training_set(out.state, &out.audit.trained_on);
  if (!cfg.warm_start) out.predictor->reinitialize();
  Rng train_rng(phase_seed(cfg, number, Phase::kTrain));
  out.predictor->train(examples, cfg.train, train_rng);

  // (6) evaluate
  out.record = evaluate(out.state, *out.predictor, cfg, out.regions);
  out.record.iteration = number;
  out.record.pseudo_threshold = cfg.strategy == Strategy::kCeal ? pseudo_threshold(cfg.pseudo, iteration) : 0.0;
  out.record.oracle_no_detect = selection.no_detection.size();
  out.record.oracle_uncertain = selection.most_uncertain.size();
  out.record.oracle_random = selection.random.size();
  if (cfg.record_timing)
    out.record.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - started)
                                .count();

  out.audit.no_detection = selection.no_detection;
  out.audit.most_uncertain = selection.most_uncertain;
  out.audit.random = selection.random;
  for (const auto& p : selection.pseudo) out.audit.pseudo.push_back(p.id);
  return out;
}

RunLog run(const RunConfig& cfg, const Dataset& dataset, const PredictorFactory& factory,
           const std::function<void(const IterationRecord&)>& on_record,
           std::unique_ptr<StochasticPredictor>* final_predictor) {
  cfg.validate();
  RunLog log;
  log.config = cfg;

  PoolState state;
  std::unique_ptr<StochasticPredictor> predictor;
  try {
    const auto started = std::chrono::steady_clock::now();
    Rng init_rng(phase_seed(cfg, 0, Phase::kInit));
    state = init_pools(dataset, cfg.split, init_rng);
    predictor = factory(cfg);
    if (!predictor) throw StateError("predictor factory returned null");

    SelectionAudit audit;
    const auto examples = training_set(state, &audit.trained_on);
    if (!examples.empty()) {
      Rng train_rng(phase_seed(cfg, 0, Phase::kInitialTrain));
      predictor->train(examples, cfg.train, train_rng);
    }
    const auto records = score_pool(state, *predictor, cfg, 0);
    const auto regions = region_table(records, state);
    auto record = evaluate(state, *predictor, cfg, regions);
    if (cfg.record_timing)
      record.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
    log.records.push_back(record);
    log.audits.push_back(std::move(audit));
    log.final_regions = regions;
    if (on_record) on_record(record);
  } catch (const IterationError&) {
    throw;
  } catch (const std::exception& e) {
    throw IterationError(0, e.what());
  }

  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    try {
      auto outcome = run_iteration(state, *predictor, cfg, t);
      state = std::move(outcome.state);
      predictor = std::move(outcome.predictor);
      log.records.push_back(outcome.record);
      log.audits.push_back(std::move(outcome.audit));
      log.final_regions = std::move(outcome.regions);
      if (on_record) on_record(log.records.back());
    } catch (const std::exception& e) {
      throw IterationError(t + 1, e.what());
    }
  }
  log.oracle_queries = state.oracle_queries();
  if (final_predictor) *final_predictor = std::move(predictor);
  return log;
}

void write_run_log_csv(std::ostream& out, const RunLog& log) {
  out << kRunLogHeader << '\n';
  char buf[320];
  for (const auto& r : log.records) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%zu,%zu,%zu,%.17g,%.17g,%zu,%zu,%zu,%zu,%lld\n",
                  r.iteration, r.n_labeled, r.n_pseudo, r.pseudo_threshold, r.oracle_no_detect,
                  r.oracle_uncertain, r.oracle_random, r.mean_test_dice, r.median_test_dice,
                  r.regions[0], r.regions[1], r.regions[2], r.regions[3],
                  static_cast<long long>(r.elapsed_ms));
    out << buf;
  }
}

std::vector<IterationRecord> read_run_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunLogHeader) throw FormatError("run log: bad header");
  std::vector<IterationRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const auto where = "run log line " + std::to_string(line_no);
    if (cells.size() != 14) throw FormatError(where + ": expected 14 columns");
    IterationRecord r;
    try {
      auto count = [&](std::size_t i) {
        std::size_t used = 0;
        const auto v = std::stoull(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::size_t>(v);
      };
      auto real = [&](std::size_t i) {
        std::size_t used = 0;
        const auto v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing characters");
        return v;
      };
      r.iteration = count(0);
      r.n_labeled = count(1);
      r.n_pseudo = count(2);
      r.pseudo_threshold = real(3);
      r.oracle_no_detect = count(4);
      r.oracle_uncertain = count(5);
      r.oracle_random = count(6);
      r.mean_test_dice = real(7);
      r.median_test_dice = real(8);
      for (std::size_t k = 0; k < 4; ++k) r.regions[k] = count(9 + k);
      r.elapsed_ms = static_cast<std::int64_t>(std::stoll(cells[13]));
    } catch (const std::exception&) {
      throw FormatError(where + ": malformed value");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ceal
