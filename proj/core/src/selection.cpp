#include "ceal/selection.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ceal {
namespace {

std::vector<const SampleRecord*> sorted_by_id(std::span<const SampleRecord> records) {
  std::vector<const SampleRecord*> out;
  out.reserve(records.size());
  std::unordered_set<SampleId> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second)
      throw ArgumentError("selection: duplicate sample id " + std::to_string(r.id));
    if (!std::isfinite(r.score.raw) || !std::isfinite(r.score.normalized))
      throw ArgumentError("selection: non-finite score for sample " + std::to_string(r.id));
    out.push_back(&r);
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->id < b->id; });
  return out;
}

// Uniformly picks up to k candidates (partial Fisher-Yates), returning them
// in draw order. Candidates left over stay in `pool`.
std::vector<SampleId> draw_uniform(std::vector<const SampleRecord*>& pool, std::size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  std::vector<SampleId> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    picked.push_back(pool[i]->id);
  }
  pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  // Restore ID order so later buckets do not depend on swap history.
  std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->id < b->id; });
  return picked;
}

}  // namespace

void PseudoPolicy::validate() const {
  if (!(delta0 >= floor)) throw ArgumentError("pseudo policy: delta0 must be >= floor");
  if (!(floor >= 0.0)) throw ArgumentError("pseudo policy: floor must be >= 0");
  if (!std::isfinite(decay)) throw ArgumentError("pseudo policy: decay must be finite");
}

double pseudo_threshold(const PseudoPolicy& policy, std::size_t iteration) {
  return std::max(policy.delta0 - static_cast<double>(iteration) * policy.decay, policy.floor);
}

std::vector<SampleId> SelectionResult::oracle_ids() const {
  std::vector<SampleId> ids(no_detection);
  ids.insert(ids.end(), most_uncertain.begin(), most_uncertain.end());
  ids.insert(ids.end(), random.begin(), random.end());
  return ids;
}

SelectionResult select_complementary(std::span<const SampleRecord> records,
                                     const SelectionQuotas& quotas, const PseudoPolicy& policy,
                                     std::size_t iteration, Rng& rng, ScoreKind kind) {
  if (records.empty()) throw ArgumentError("selection: no records");
  policy.validate();
  auto remaining = sorted_by_id(records);
  SelectionResult result;
  result.pseudo_threshold = pseudo_threshold(policy, iteration);

  // (a) no-detections
  std::vector<const SampleRecord*> empties;
  std::vector<const SampleRecord*> others;
  for (auto* r : remaining) (r->predicted_empty ? empties : others).push_back(r);
  result.no_detection = draw_uniform(empties, quotas.no_detection, rng);
  std::size_t carry = quotas.no_detection - result.no_detection.size();
  others.insert(others.end(), empties.begin(), empties.end());
  std::sort(others.begin(), others.end(), [](auto* a, auto* b) { return a->id < b->id; });
  remaining = std::move(others);

  // (b) most uncertain, ties broken by ascending id
  const auto k_uncertain = std::min(quotas.most_uncertain + carry, remaining.size());
  std::stable_sort(remaining.begin(), remaining.end(), [kind](auto* a, auto* b) {
    const double va = a->value(kind);
    const double vb = b->value(kind);
    return va != vb ? va > vb : a->id < b->id;
  });
  for (std::size_t i = 0; i < k_uncertain; ++i) result.most_uncertain.push_back(remaining[i]->id);
  carry = quotas.most_uncertain + carry - k_uncertain;
  remaining.erase(remaining.begin(), remaining.begin() + static_cast<std::ptrdiff_t>(k_uncertain));
  std::sort(remaining.begin(), remaining.end(), [](auto* a, auto* b) { return a->id < b->id; });

  // (c) random; any final shortfall is dropped
  result.random = draw_uniform(remaining, quotas.random + carry, rng);

  // (d) pseudo-labels among the samples left
  for (auto* r : remaining) {
    if (r->predicted_empty || r->degenerate) continue;
    if (r->value(kind) < result.pseudo_threshold) result.pseudo.push_back({r->id, r->predicted});
  }
  return result;
}

SelectionResult select_random(std::span<const SampleRecord> records, std::size_t budget, Rng& rng) {
  if (records.empty()) throw ArgumentError("selection: no records");
  auto remaining = sorted_by_id(records);
  SelectionResult result;
  result.random = draw_uniform(remaining, budget, rng);
  return result;
}

}  // namespace ceal
