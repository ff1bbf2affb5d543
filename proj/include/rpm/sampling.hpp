#pragma once

#include <cstdint>
#include <vector>

#include "rpm/dataset.hpp"

namespace rpm {

struct FoldPlan {
  std::size_t fold_count = 10;
  std::vector<std::vector<std::size_t>> folds;  // instance indices, ascending
  std::uint64_t seed = 0;

  /// Every index not in fold `k`, ascending.
  std::vector<std::size_t> training_indices(std::size_t k) const;
  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Exactly `per_class_n` instances of every class. Classes larger than that are
/// sampled without replacement, smaller ones with replacement. Rows are
/// appended class by class, then shuffled.
Dataset bootstrap_balance(const Dataset& d, std::size_t per_class_n, std::uint64_t seed);

/// Stratified k-fold partition: each class is shuffled and dealt round-robin,
/// continuing from the fold where the previous class stopped so fold sizes
/// differ by at most one.
FoldPlan stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed);

}  // namespace rpm
