#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rpm/dataset.hpp"
#include "rpm/random.hpp"

namespace rpm {

/// Encoded training inputs shared by every learner.
struct TrainingData {
  NumericMatrix x;
  std::vector<AttributeMeta> attributes;  // regular attributes, column order of x
  std::vector<std::size_t> y;             // class index per row
  std::vector<std::string> class_labels;

  std::size_t rows() const { return x.rows; }
  std::size_t cols() const { return x.cols; }
  std::size_t num_classes() const { return class_labels.size(); }
  bool nominal(std::size_t col) const { return attributes[col].is_nominal(); }
  std::vector<std::size_t> class_counts() const;
};

TrainingData make_training_data(const Dataset& d);

struct TreeNode {
  bool leaf = true;
  std::size_t attribute = 0;
  bool nominal = false;
  double threshold = 0.0;         // numeric: go left when value <= threshold
  std::size_t category = 0;       // nominal: go left when value == category
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::size_t prediction = 0;
  std::vector<std::size_t> class_counts;
  std::size_t depth = 0;

  std::size_t count() const;
};

/// Binary classification tree. Node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_for(std::span<const double> row) const;
  std::size_t predict(std::span<const double> row) const { return nodes[leaf_for(row)].prediction; }
  std::size_t leaf_count() const;
  std::size_t depth() const;
};

struct TreeGrowth {
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;            // 0 = unlimited
  std::size_t attributes_per_node = 0;  // 0 = every attribute (CART)
};

/// A candidate split and its Gini gain.
struct SplitChoice {
  bool valid = false;
  std::size_t attribute = 0;
  bool nominal = false;
  double threshold = 0.0;
  std::size_t category = 0;
  double gain = 0.0;
};

double gini(std::span<const std::size_t> class_counts);

/// Majority class; ties go to the class with the larger count in `priors`,
/// then to the lowest class index. Classes with zero count never win unless
/// every count is zero.
std::size_t majority_class(std::span<const std::size_t> counts, std::span<const std::size_t> priors);

/// Grows a tree on the given rows (indices into `data`, repeats allowed).
/// Candidate splits: numeric "value <= midpoint of adjacent distinct values",
/// nominal "value == category" versus the rest. A split must leave
/// `min_leaf` rows on each side; the best Gini gain wins, earlier candidates
/// win near-ties. `rng` is consulted only when attributes_per_node limits
/// the attribute scan.
Tree grow_tree(const TrainingData& data, std::span<const std::size_t> rows, const TreeGrowth& growth, Rng& rng);

/// Best split of `rows` considering attributes in `order`, as the grower evaluates them.
SplitChoice best_split(const TrainingData& data, std::span<const std::size_t> rows,
                       std::span<const std::size_t> order, std::size_t min_leaf);

}  // namespace rpm
