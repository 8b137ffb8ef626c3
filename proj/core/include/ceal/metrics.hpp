#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ceal/distance.hpp"
#include "ceal/imaging.hpp"
#include "ceal/pool.hpp"
#include "ceal/predictor.hpp"
#include "ceal/selection.hpp"

namespace ceal {

// 2|A∩B| / (|A|+|B|); 1 when both masks are empty.
double dice(const BinaryMask& a, const BinaryMask& b);

enum class RegionLabel {
  kUndetected = 1,        // R1
  kUncertainCorrect = 2,  // R2
  kCertainCorrect = 3,    // R3
  kUncertainWrong = 4,    // R4
};

const char* region_name(RegionLabel r);

struct RegionThresholds {
  double tau_u = 0.0;  // raw score boundary
  double tau_d = 0.5;  // Dice boundary
};

// Quadrants of (score vs tau_u, dice vs tau_d). "High" means >= threshold.
// An empty prediction scoring below tau_d is always R1.
RegionLabel classify_region(double dice_val, const UncertaintyScore& score, bool empty_prediction,
                            const RegionThresholds& th);

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges over [0, max]
  std::vector<std::size_t> counts;
};

// Equal-width bins over [0, max raw score]. Empty input gives an empty histogram.
Histogram region_histogram(std::span<const double> raw_scores, std::size_t bins);
Histogram region_histogram(std::span<const UncertaintyScore> scores, std::size_t bins);

double median(std::vector<double> values);

struct RegionRow {
  SampleId id = 0;
  double dice = 0.0;
  double raw_score = 0.0;
  double normalized_score = 0.0;
  bool empty_prediction = false;
  RegionLabel region = RegionLabel::kCertainCorrect;
};

// One row per scored record, tau_u defaulting to the median raw score of the
// records when `tau_u` is negative.
std::vector<RegionRow> region_table(std::span<const SampleRecord> records, const PoolState& pool,
                                    double tau_u = -1.0, double tau_d = 0.5);

// Columns: sample_id,dice,raw_score,normalized_score,empty_prediction,region
void write_region_csv(std::ostream& out, std::span<const RegionRow> rows);
std::vector<RegionRow> read_region_csv(std::istream& in);

struct IterationMetrics {
  double mean_test_dice = 0.0;
  double median_test_dice = 0.0;
  std::size_t n_labeled = 0;
  std::size_t n_pseudo = 0;
  std::array<std::size_t, 4> region_counts{};  // R1..R4 over the scored unlabeled pool
};

// Dice of deterministic predictions on every test sample, in id order.
std::vector<double> test_dice(const PoolState& pool, const StochasticPredictor& predictor,
                              double binarize_threshold);

IterationMetrics iteration_metrics(const PoolState& pool, const StochasticPredictor& predictor,
                                   double binarize_threshold, std::span<const RegionRow> regions);

}  // namespace ceal
