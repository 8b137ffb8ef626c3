#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ceal/metrics.hpp"
#include "ceal/pool.hpp"
#include "ceal/predictor.hpp"
#include "ceal/run_config.hpp"
#include "ceal/selection.hpp"

namespace ceal {

// One RunLog CSV row. Row 0 describes the model trained on the seed labeled
// set; row t >= 1 describes active learning iteration t.
struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t n_labeled = 0;
  std::size_t n_pseudo = 0;
  double pseudo_threshold = 0.0;
  std::size_t oracle_no_detect = 0;
  std::size_t oracle_uncertain = 0;
  std::size_t oracle_random = 0;
  double mean_test_dice = 0.0;
  double median_test_dice = 0.0;
  std::array<std::size_t, 4> regions{};
  std::int64_t elapsed_ms = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

// Selections of one iteration kept for auditing; not part of the CSV.
struct SelectionAudit {
  std::vector<SampleId> no_detection;
  std::vector<SampleId> most_uncertain;
  std::vector<SampleId> random;
  std::vector<SampleId> pseudo;
  std::vector<SampleId> trained_on;
};

struct RunLog {
  RunConfig config;
  std::vector<IterationRecord> records;
  std::vector<SelectionAudit> audits;  // audits[i] belongs to records[i]
  std::size_t oracle_queries = 0;
  std::vector<RegionRow> final_regions;
};

inline constexpr const char* kRunLogHeader =
    "iteration,n_labeled,n_pseudo,pseudo_threshold,oracle_no_detect,oracle_uncertain,oracle_random,"
    "mean_test_dice,median_test_dice,r1,r2,r3,r4,elapsed_ms";

void write_run_log_csv(std::ostream& out, const RunLog& log);
std::vector<IterationRecord> read_run_log_csv(std::istream& in);

using PredictorFactory = std::function<std::unique_ptr<StochasticPredictor>(const RunConfig&)>;

// Failure inside a run, tagged with the iteration (0 = initial training).
class IterationError : public std::runtime_error {
 public:
  IterationError(std::size_t iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// MC-predicts, binarizes and scores every unlabeled sample. Per-sample rng
// streams come from (seed, stream, id), so results do not depend on thread
// scheduling. Records are in ascending id order.
std::vector<SampleRecord> score_pool(const PoolState& pool, const StochasticPredictor& predictor,
                                     const RunConfig& cfg, std::uint64_t stream);

// Labeled samples with ground truth plus pseudo-marked samples with their
// predicted masks, in id order.
std::vector<TrainingExample> training_set(const PoolState& pool, std::vector<SampleId>* ids = nullptr);

struct IterationOutcome {
  PoolState state;
  std::unique_ptr<StochasticPredictor> predictor;
  IterationRecord record;
  SelectionAudit audit;
  std::vector<RegionRow> regions;
};

// Score -> select -> oracle label -> pseudo mark -> retrain -> evaluate.
// `iteration` is zero-based (< cfg.iterations); the record is numbered
// iteration + 1. Inputs are never modified, so a failure leaves the caller's
// state as it was.
IterationOutcome run_iteration(const PoolState& state, const StochasticPredictor& predictor,
                               const RunConfig& cfg, std::size_t iteration);

// Initial split and training, then cfg.iterations calls to run_iteration.
// `on_record` (optional) sees each record as it is appended; the trained
// model is handed back through `final_predictor` when non-null.
RunLog run(const RunConfig& cfg, const Dataset& dataset, const PredictorFactory& factory,
           const std::function<void(const IterationRecord&)>& on_record = {},
           std::unique_ptr<StochasticPredictor>* final_predictor = nullptr);

}  // namespace ceal
