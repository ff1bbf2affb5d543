#include "rpm/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "rpm/error.hpp"
#include "rpm/random.hpp"

namespace rpm {

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const Dataset& d) {
  std::vector<std::vector<std::size_t>> out(d.num_classes());
  for (std::size_t r = 0; r < d.num_rows(); ++r) out[d.class_of(r)].push_back(r);
  return out;
}

}  // namespace

std::vector<std::size_t> FoldPlan::training_indices(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != k) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset bootstrap_balance(const Dataset& d, std::size_t per_class_n, std::uint64_t seed) {
  if (per_class_n == 0) throw ConfigError("per-class sample size must be positive");
  if (d.num_classes() < 2) throw DataError("balancing needs at least two classes");
  const auto groups = rows_by_class(d);
  Rng rng(seed);

  std::vector<std::size_t> picked;
  picked.reserve(per_class_n * groups.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto& rows = groups[c];
    if (rows.empty()) throw DataError("class '" + d.class_labels()[c] + "' has no instances");
    if (rows.size() >= per_class_n) {
      std::vector<std::size_t> pool = rows;
      shuffle(std::span(pool), rng);
      // Keep source order within the class sample; the final shuffle mixes rows anyway.
      pool.resize(per_class_n);
      std::sort(pool.begin(), pool.end());
      picked.insert(picked.end(), pool.begin(), pool.end());
    } else {
      for (std::size_t i = 0; i < per_class_n; ++i) picked.push_back(rows[uniform_below(rng, rows.size())]);
    }
  }
  shuffle(std::span(picked), rng);
  return d.select_rows(picked);
}

FoldPlan stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ConfigError("fold count must be positive");
  const auto groups = rows_by_class(d);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < k) {
      throw DataError("class '" + d.class_labels()[c] + "' has " + std::to_string(groups[c].size()) +
                      " instances, fewer than the " + std::to_string(k) + " folds requested");
    }
  }
  FoldPlan plan;
  plan.fold_count = k;
  plan.seed = seed;
  plan.folds.assign(k, {});
  Rng rng(seed);
  std::size_t next = 0;
  for (const auto& rows : groups) {
    std::vector<std::size_t> order = rows;
    shuffle(std::span(order), rng);
    for (auto r : order) {
      plan.folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace rpm
