#include "chaoswave/folds.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "chaoswave/errors.hpp"
#include "chaoswave/seed.hpp"

namespace chaoswave {

std::size_t FoldPlan::fold_of(const std::string& source_id) const {
  const auto it = assignments.find(source_id);
  if (it == assignments.end()) throw InvalidInput("fold plan has no entry for source '" + source_id + "'");
  return it->second;
}

FoldPlan make_folds(const std::vector<std::pair<std::string, Label>>& sources, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("make_folds: k must be >= 2");
  std::map<std::string, Label> unique;
  for (const auto& [id, label] : sources) {
    const auto [it, inserted] = unique.emplace(id, label);
    if (!inserted && it->second != label) throw InvalidInput("make_folds: source '" + id + "' has two labels");
  }
  std::vector<std::string> by_class[2];
  for (const auto& [id, label] : unique) by_class[static_cast<int>(label)].push_back(id);  // sorted by id

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  std::mt19937_64 rng(stage_seed(seed, "folds"));
  std::size_t offset = 0;
  for (auto& ids : by_class) {
    if (ids.size() < k) {
      throw InvalidInput("make_folds: each class needs at least k=" + std::to_string(k) + " sources, got " +
                         std::to_string(ids.size()));
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < ids.size(); ++i) plan.assignments[ids[i]] = (offset + i) % k;
    // Start the next class where this one stopped so fold totals stay level.
    offset = (offset + ids.size()) % k;
  }
  return plan;
}

std::vector<std::pair<std::string, Label>> dataset_sources(const LabeledDataset& dataset) {
  std::vector<std::pair<std::string, Label>> out;
  std::set<std::string> seen;
  for (const auto& item : dataset.items) {
    if (seen.insert(item.source_id).second) out.emplace_back(item.source_id, item.label);
  }
  return out;
}

FoldSplit split_fold(const LabeledDataset& dataset, const FoldPlan& plan, std::size_t fold,
                     bool include_augmented_in_validation) {
  if (fold >= plan.k) throw InvalidInput("split_fold: fold index out of range");
  FoldSplit s;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& item = dataset.items[i];
    if (plan.fold_of(item.source_id) != fold) {
      s.train.push_back(i);
    } else if (!item.augmented || include_augmented_in_validation) {
      s.validation.push_back(i);
    }
  }
  return s;
}

}  // namespace chaoswave
