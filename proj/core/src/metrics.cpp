#include "ceal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ceal {

double dice(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw ArgumentError("dice: mask dimensions do not match");
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t both = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    both += a[i] & b[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

const char* region_name(RegionLabel r) {
  switch (r) {
    case RegionLabel::kUndetected: return "R1";
    case RegionLabel::kUncertainCorrect: return "R2";
    case RegionLabel::kCertainCorrect: return "R3";
    case RegionLabel::kUncertainWrong: return "R4";
  }
  return "?";
}

RegionLabel classify_region(double dice_val, const UncertaintyScore& score, bool empty_prediction,
                            const RegionThresholds& th) {
  const bool accurate = dice_val >= th.tau_d;
  if (empty_prediction && !accurate) return RegionLabel::kUndetected;
  const bool uncertain = score.raw >= th.tau_u;
  if (uncertain) return accurate ? RegionLabel::kUncertainCorrect : RegionLabel::kUncertainWrong;
  return accurate ? RegionLabel::kCertainCorrect : RegionLabel::kUndetected;
}

Histogram region_histogram(std::span<const double> raw_scores, std::size_t bins) {
  if (bins == 0) throw ArgumentError("histogram: bins must be >= 1");
  Histogram h;
  if (raw_scores.empty()) return h;
  const double top = *std::max_element(raw_scores.begin(), raw_scores.end());
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(top * static_cast<double>(b) / bins);
  for (const double v : raw_scores) {
    std::size_t b = 0;
    if (top > 0.0) b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, v / top * bins)));
    ++h.counts[b];
  }
  return h;
}

Histogram region_histogram(std::span<const UncertaintyScore> scores, std::size_t bins) {
  std::vector<double> raw;
  raw.reserve(scores.size());
  for (const auto& s : scores) raw.push_back(s.raw);
  return region_histogram(raw, bins);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median: empty input");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<RegionRow> region_table(std::span<const SampleRecord> records, const PoolState& pool,
                                    double tau_u, double tau_d) {
  std::vector<RegionRow> rows;
  if (records.empty()) return rows;
  RegionThresholds th{tau_u, tau_d};
  if (tau_u < 0.0) {
    std::vector<double> raw;
    for (const auto& r : records) raw.push_back(r.score.raw);
    th.tau_u = median(std::move(raw));
  }
  rows.reserve(records.size());
  for (const auto& r : records) {
    if (!r.predicted) throw ArgumentError("region table: record without predicted mask");
    RegionRow row;
    row.id = r.id;
    row.dice = dice(*r.predicted, pool.analysis_truth(r.id));
    row.raw_score = r.score.raw;
    row.normalized_score = r.score.normalized;
    row.empty_prediction = r.predicted_empty;
    row.region = classify_region(row.dice, r.score, r.predicted_empty, th);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return rows;
}

void write_region_csv(std::ostream& out, std::span<const RegionRow> rows) {
  out << "sample_id,dice,raw_score,normalized_score,empty_prediction,region\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g,%d,%s\n", r.id, r.dice, r.raw_score,
                  r.normalized_score, r.empty_prediction ? 1 : 0, region_name(r.region));
    out << buf;
  }
}

std::vector<RegionRow> read_region_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,dice,raw_score,normalized_score,empty_prediction,region")
    throw FormatError("region csv: bad header");
  std::vector<RegionRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const auto where = "region csv line " + std::to_string(line_no);
    if (cells.size() != 6) throw FormatError(where + ": expected 6 columns");
    RegionRow r;
    try {
      std::size_t used = 0;
      r.id = static_cast<SampleId>(std::stoul(cells[0], &used));
      r.dice = std::stod(cells[1]);
      r.raw_score = std::stod(cells[2]);
      r.normalized_score = std::stod(cells[3]);
    } catch (const std::exception&) {
      throw FormatError(where + ": malformed number");
    }
    if (cells[4] != "0" && cells[4] != "1") throw FormatError(where + ": empty_prediction must be 0 or 1");
    r.empty_prediction = cells[4] == "1";
    if (cells[5].size() != 2 || cells[5][0] != 'R' || cells[5][1] < '1' || cells[5][1] > '4')
      throw FormatError(where + ": bad region");
    r.region = static_cast<RegionLabel>(cells[5][1] - '0');
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> test_dice(const PoolState& pool, const StochasticPredictor& predictor,
                              double binarize_threshold) {
  std::vector<double> out;
  out.reserve(pool.test().size());
  for (const auto& [id, entry] : pool.test()) {
    const auto pred = binarize(predictor.predict_deterministic(*entry.image), binarize_threshold);
    out.push_back(dice(pred, *entry.mask));
  }
  return out;
}

IterationMetrics iteration_metrics(const PoolState& pool, const StochasticPredictor& predictor,
                                   double binarize_threshold, std::span<const RegionRow> regions) {
  if (pool.test().empty()) throw ArgumentError("iteration metrics: empty test set");
  const auto d = test_dice(pool, predictor, binarize_threshold);
  IterationMetrics m;
  m.mean_test_dice = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  m.median_test_dice = median(d);
  m.n_labeled = pool.labeled().size();
  m.n_pseudo = pool.pseudo_count();
  for (const auto& r : regions) ++m.region_counts[static_cast<int>(r.region) - 1];
  return m;
}

}  // namespace ceal
