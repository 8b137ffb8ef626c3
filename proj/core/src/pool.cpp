#include "ceal/pool.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

namespace ceal {

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest = dir / kManifestName;
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest", manifest.string());
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t used = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size())
      throw FormatError("manifest line " + std::to_string(line_no) + ": not a sample id");
    const auto sid = static_cast<SampleId>(id);
    auto image = std::make_shared<const GrayImage>(load_pgm((dir / image_file_name(sid)).string()));
    auto mask = std::make_shared<const BinaryMask>(load_pgm_mask((dir / mask_file_name(sid)).string()));
    if (!image->same_shape(*mask))
      throw FormatError("sample " + std::to_string(sid) + ": image and mask sizes differ");
    if (!ds.samples.emplace(sid, DatasetSample{std::move(image), std::move(mask)}).second)
      throw FormatError("manifest: duplicate id " + std::to_string(sid));
  }
  return ds;
}

Dataset make_synthetic_dataset(std::size_t n, const SynthParams& params, std::uint64_t seed) {
  Dataset ds;
  for (std::size_t id = 0; id < n; ++id) {
    auto s = generate_sample(params, seed, id);
    ds.samples.emplace(static_cast<SampleId>(id),
                       DatasetSample{std::make_shared<const GrayImage>(std::move(s.image)),
                                     std::make_shared<const BinaryMask>(std::move(s.mask))});
  }
  return ds;
}

PoolState init_pools(const Dataset& dataset, const SplitSizes& split, Rng& rng) {
  if (dataset.size() < split.total())
    throw ConfigError("dataset has " + std::to_string(dataset.size()) + " samples, split needs " +
                      std::to_string(split.total()));
  std::vector<SampleId> ids;
  ids.reserve(dataset.size());
  for (const auto& [id, _] : dataset.samples) ids.push_back(id);
  rng.shuffle(std::span<SampleId>(ids));

  PoolState pool;
  std::size_t i = 0;
  for (; i < split.labeled; ++i) {
    const auto& s = dataset.samples.at(ids[i]);
    pool.labeled_.emplace(ids[i], LabeledEntry{s.image, s.mask});
  }
  for (; i < split.labeled + split.unlabeled; ++i) {
    const auto& s = dataset.samples.at(ids[i]);
    pool.unlabeled_.emplace(ids[i], UnlabeledEntry{s.image, nullptr});
    pool.hidden_gt_.emplace(ids[i], s.mask);
  }
  for (; i < split.total(); ++i) {
    const auto& s = dataset.samples.at(ids[i]);
    pool.test_.emplace(ids[i], LabeledEntry{s.image, s.mask});
  }
  return pool;
}

std::size_t PoolState::pseudo_count() const {
  return static_cast<std::size_t>(
      std::count_if(unlabeled_.begin(), unlabeled_.end(), [](const auto& kv) { return kv.second.pseudo != nullptr; }));
}

BinaryMask PoolState::oracle_label(SampleId id) {
  const auto it = hidden_gt_.find(id);
  if (it == hidden_gt_.end() || !unlabeled_.contains(id))
    throw ConsistencyError("oracle: sample " + std::to_string(id) + " is not in the unlabeled pool");
  ++oracle_queries_;
  return *it->second;
}

const BinaryMask& PoolState::analysis_truth(SampleId id) const {
  const auto it = hidden_gt_.find(id);
  if (it == hidden_gt_.end())
    throw ConsistencyError("sample " + std::to_string(id) + " is not in the unlabeled pool");
  return *it->second;
}

void PoolState::clear_pseudo() {
  for (auto& [_, entry] : unlabeled_) entry.pseudo.reset();
}

void PoolState::apply_selection(const SelectionResult& result) {
  // Validate everything first so a bad result leaves the pool untouched.
  std::set<SampleId> seen;
  const auto oracle = result.oracle_ids();
  for (const auto id : oracle) {
    if (!unlabeled_.contains(id))
      throw ConsistencyError("selection: oracle id " + std::to_string(id) + " is not unlabeled");
    if (!seen.insert(id).second)
      throw ConsistencyError("selection: id " + std::to_string(id) + " selected twice");
  }
  for (const auto& p : result.pseudo) {
    if (!unlabeled_.contains(p.id))
      throw ConsistencyError("selection: pseudo id " + std::to_string(p.id) + " is not unlabeled");
    if (!seen.insert(p.id).second)
      throw ConsistencyError("selection: id " + std::to_string(p.id) + " selected twice");
    if (!p.mask) throw ConsistencyError("selection: pseudo id " + std::to_string(p.id) + " has no mask");
  }

  clear_pseudo();
  for (const auto id : oracle) {
    auto mask = std::make_shared<const BinaryMask>(oracle_label(id));
    auto node = unlabeled_.extract(id);
    labeled_.emplace(id, LabeledEntry{std::move(node.mapped().image), std::move(mask)});
    hidden_gt_.erase(id);
  }
  for (const auto& p : result.pseudo) unlabeled_.at(p.id).pseudo = p.mask;
}

void PoolState::check_invariants() const {
  for (const auto& [id, _] : labeled_)
    if (unlabeled_.contains(id) || test_.contains(id))
      throw ConsistencyError("pool: id " + std::to_string(id) + " is in two sets");
  for (const auto& [id, _] : unlabeled_)
    if (test_.contains(id)) throw ConsistencyError("pool: id " + std::to_string(id) + " is in two sets");
  if (hidden_gt_.size() != unlabeled_.size())
    throw ConsistencyError("pool: hidden ground truth does not match the unlabeled set");
  for (const auto& [id, _] : hidden_gt_)
    if (!unlabeled_.contains(id)) throw ConsistencyError("pool: stray hidden ground truth");
}

}  // namespace ceal
