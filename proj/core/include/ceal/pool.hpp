#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ceal/imaging.hpp"
#include "ceal/rng.hpp"
#include "ceal/selection.hpp"
#include "ceal/synthdata.hpp"

namespace ceal {

struct DatasetSample {
  std::shared_ptr<const GrayImage> image;
  std::shared_ptr<const BinaryMask> mask;
};

// Images and ground truth keyed by sample id.
struct Dataset {
  std::map<SampleId, DatasetSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

// Reads manifest.txt and the img_/msk_ PGM pairs it lists.
Dataset load_dataset(const std::filesystem::path& dir);

// Same samples as generate_dataset(n, params, seed, ...), kept in memory.
Dataset make_synthetic_dataset(std::size_t n, const SynthParams& params, std::uint64_t seed);

struct SplitSizes {
  std::size_t labeled = 600;
  std::size_t unlabeled = 1000;
  std::size_t test = 400;

  std::size_t total() const noexcept { return labeled + unlabeled + test; }
};

struct LabeledEntry {
  std::shared_ptr<const GrayImage> image;
  std::shared_ptr<const BinaryMask> mask;
};

struct UnlabeledEntry {
  std::shared_ptr<const GrayImage> image;
  std::shared_ptr<const BinaryMask> pseudo;  // transient label, null when unmarked
};

// Partition of sample ids into labeled / unlabeled / test. Ground truth of
// unlabeled samples is held back and released one id at a time through
// oracle_label().
class PoolState {
 public:
  PoolState() = default;

  const std::map<SampleId, LabeledEntry>& labeled() const noexcept { return labeled_; }
  const std::map<SampleId, UnlabeledEntry>& unlabeled() const noexcept { return unlabeled_; }
  const std::map<SampleId, LabeledEntry>& test() const noexcept { return test_; }

  std::size_t oracle_queries() const noexcept { return oracle_queries_; }
  std::size_t pseudo_count() const;

  // Ground truth of an unlabeled sample; counts as one oracle query.
  // Throws ConsistencyError when id is not unlabeled.
  BinaryMask oracle_label(SampleId id);

  // Ground truth of an unlabeled sample for offline analysis (region
  // taxonomy). Never feeds selection or training; not an oracle query.
  const BinaryMask& analysis_truth(SampleId id) const;

  // Clears previous pseudo marks, moves oracle ids to labeled with their
  // ground truth, and marks pseudo ids with their predicted masks.
  void apply_selection(const SelectionResult& result);

  void clear_pseudo();

  // Throws ConsistencyError when the partition invariants are broken.
  void check_invariants() const;

  friend PoolState init_pools(const Dataset& dataset, const SplitSizes& split, Rng& rng);

 private:
  std::map<SampleId, LabeledEntry> labeled_;
  std::map<SampleId, UnlabeledEntry> unlabeled_;
  std::map<SampleId, LabeledEntry> test_;
  std::map<SampleId, std::shared_ptr<const BinaryMask>> hidden_gt_;
  std::size_t oracle_queries_ = 0;
};

// Uniform random disjoint split. Throws ConfigError if the dataset is smaller
// than the split total.
PoolState init_pools(const Dataset& dataset, const SplitSizes& split, Rng& rng);

}  // namespace ceal
