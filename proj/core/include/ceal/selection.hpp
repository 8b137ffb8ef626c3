#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ceal/distance.hpp"
#include "ceal/imaging.hpp"
#include "ceal/rng.hpp"

namespace ceal {

using SampleId = std::uint32_t;

// Human annotations requested per iteration, by reason.
struct SelectionQuotas {
  std::size_t no_detection = 10;
  std::size_t most_uncertain = 10;
  std::size_t random = 15;

  std::size_t total() const noexcept { return no_detection + most_uncertain + random; }
};

// Linearly decaying score threshold under which confident predictions are
// used as pseudo-labels: max(delta0 - t * decay, floor).
struct PseudoPolicy {
  double delta0 = 150.0;
  double decay = 10.0;
  double floor = 50.0;

  void validate() const;
};

double pseudo_threshold(const PseudoPolicy& policy, std::size_t iteration);

enum class ScoreKind { kRaw, kNormalized };

// Per unlabeled sample outcome of MC scoring.
struct SampleRecord {
  SampleId id = 0;
  UncertaintyScore score;
  bool degenerate = false;
  bool predicted_empty = false;
  std::shared_ptr<const BinaryMask> predicted;  // binarized mean prediction

  double value(ScoreKind kind) const { return kind == ScoreKind::kRaw ? score.raw : score.normalized; }
};

struct PseudoLabel {
  SampleId id = 0;
  std::shared_ptr<const BinaryMask> mask;
};

struct SelectionResult {
  std::vector<SampleId> no_detection;
  std::vector<SampleId> most_uncertain;
  std::vector<SampleId> random;
  std::vector<PseudoLabel> pseudo;
  double pseudo_threshold = 0.0;

  // All oracle queries in bucket order.
  std::vector<SampleId> oracle_ids() const;
  std::size_t oracle_count() const noexcept {
    return no_detection.size() + most_uncertain.size() + random.size();
  }
};

// Complementary selection. Buckets are filled in order no-detection ->
// most-uncertain -> random, each unfilled quota carried to the next bucket;
// pseudo-labels are the unchosen, non-degenerate, non-empty predictions
// scoring under the iteration's threshold.
SelectionResult select_complementary(std::span<const SampleRecord> records,
                                     const SelectionQuotas& quotas, const PseudoPolicy& policy,
                                     std::size_t iteration, Rng& rng,
                                     ScoreKind kind = ScoreKind::kRaw);

// Random-acquisition baseline: `budget` uniform oracle picks, no pseudo-labels.
SelectionResult select_random(std::span<const SampleRecord> records, std::size_t budget, Rng& rng);

}  // namespace ceal
