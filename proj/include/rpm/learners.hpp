#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpm/dataset.hpp"
#include "rpm/tree.hpp"

namespace rpm {

enum class Algorithm { cart, random_tree, random_forest, knn, kstar, vote };

std::string_view to_string(Algorithm a);
/// Accepts the names produced by to_string; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

/// Learner choice plus hyperparameters. Fields not used by the chosen
/// algorithm are ignored.
struct LearnerSpec {
  Algorithm algorithm = Algorithm::cart;
  std::size_t min_leaf = 2;             // tree learners
  std::size_t max_depth = 0;            // tree learners, 0 = unlimited
  std::size_t attributes_per_node = 0;  // random_tree / random_forest; 0 = ceil(sqrt(#attributes))
  std::size_t trees = 100;              // random_forest
  bool bootstrap = true;                // random_forest
  std::size_t neighbors = 5;            // knn
  bool distance_weighting = false;      // knn, weights 1/distance
  double blend = 20.0;                  // kstar, percent in (0, 100]
  std::uint64_t seed = 0;

  static LearnerSpec cart();
  static LearnerSpec random_tree();
  static LearnerSpec random_forest();
  static LearnerSpec knn();
  static LearnerSpec kstar();

  /// Throws ConfigError when a hyperparameter is outside its range.
  void validate() const;
  std::string describe() const;
  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

namespace detail {
class ModelImpl;
}

/// Immutable trained predictor; cheap to copy and safe to share across threads.
class TrainedModel {
 public:
  TrainedModel() = default;
  explicit TrainedModel(std::shared_ptr<const detail::ModelImpl> impl);

  Algorithm algorithm() const;
  /// Class index into class_labels(). `row` holds the encoded regular
  /// attributes in training column order. Nominal categories never seen in
  /// training are replaced by the most frequent training category.
  std::size_t predict(std::span<const double> row) const;
  const std::string& predict_label(std::span<const double> row) const;

  const std::vector<std::string>& class_labels() const;
  /// Class histogram of the training data; index order matches class_labels().
  const std::vector<std::size_t>& training_class_counts() const;
  std::size_t arity() const;
  /// Set for cart and random_tree models.
  const Tree* tree() const;
  /// Set for random_forest models.
  const std::vector<Tree>* forest() const;

  explicit operator bool() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const detail::ModelImpl> impl_;
};

TrainedModel train_cart(const TrainingData& data, const LearnerSpec& spec = LearnerSpec::cart());
TrainedModel train_random_tree(const TrainingData& data, const LearnerSpec& spec = LearnerSpec::random_tree());
TrainedModel train_random_forest(const TrainingData& data, const LearnerSpec& spec = LearnerSpec::random_forest());
TrainedModel train_knn(const TrainingData& data, const LearnerSpec& spec = LearnerSpec::knn());
TrainedModel train_kstar(const TrainingData& data, const LearnerSpec& spec = LearnerSpec::kstar());

/// Dispatches on spec.algorithm (vote is not a base learner and is rejected).
TrainedModel train(const TrainingData& data, const LearnerSpec& spec);
TrainedModel train(const Dataset& d, const LearnerSpec& spec);

}  // namespace rpm
