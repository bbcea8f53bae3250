#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chaoswave/imageio.hpp"

namespace chaoswave {

/// Fold assignment at the level of source images. Augmented items inherit
/// their source's fold, so variants of one image never straddle a split.
struct FoldPlan {
  std::size_t k = 5;
  std::map<std::string, std::size_t> assignments;  // source_id -> fold
  std::uint64_t seed = 0;

  std::size_t fold_of(const std::string& source_id) const;
};

/// Stratified by label: each class's sources are shuffled with `seed` and dealt
/// round-robin, so per-class fold sizes differ by at most one. Throws
/// InvalidInput when a class has fewer than k sources or one id carries two
/// labels.
FoldPlan make_folds(const std::vector<std::pair<std::string, Label>>& sources, std::size_t k, std::uint64_t seed);

/// Unique (source_id, label) pairs in first-seen order.
std::vector<std::pair<std::string, Label>> dataset_sources(const LabeledDataset& dataset);

struct FoldSplit {
  std::vector<std::size_t> train;       // item indices
  std::vector<std::size_t> validation;  // item indices
};

/// Training gets every item (original or augmented) of the other folds.
/// Validation gets the fold's originals, plus its augmented items when
/// `include_augmented_in_validation` is set.
FoldSplit split_fold(const LabeledDataset& dataset, const FoldPlan& plan, std::size_t fold,
                     bool include_augmented_in_validation = false);

}  // namespace chaoswave
