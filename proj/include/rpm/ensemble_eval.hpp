#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpm/dataset.hpp"
#include "rpm/learners.hpp"
#include "rpm/sampling.hpp"

namespace rpm {

/// Majority vote over base models trained on the same data.
TrainedModel make_vote(std::vector<TrainedModel> members);

/// Modal label of the members' predictions. Ties go to the class with the
/// larger training count, then to the lowest class index. Throws ConfigError
/// for an empty list or members with different training label sets.
std::size_t vote_predict(std::span<const TrainedModel> models, std::span<const double> row);

/// Rows are actual classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_labels);

  std::size_t size() const { return labels.size(); }
  std::size_t total() const;
  void add(std::size_t actual, std::size_t predicted, std::size_t n = 1) { counts[actual][predicted] += n; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricSet {
  double accuracy = 0.0;
  double kappa = 0.0;
  double weighted_mean_recall = 0.0;
  double weighted_mean_precision = 0.0;
  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

/// Accuracy, Cohen's kappa, and the macro-averaged recall and precision the
/// result tables call "weighted mean". A class never predicted contributes
/// precision 0; a class absent from the actuals contributes recall 0. Kappa is
/// 0 when chance agreement is 1. Throws DataError on an empty matrix.
MetricSet evaluate_confusion(const ConfusionMatrix& cm);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

MeanStd mean_std(std::span<const double> values);

struct EvaluationReport {
  std::vector<MetricSet> folds;
  std::vector<ConfusionMatrix> fold_confusions;
  ConfusionMatrix pooled;
  MeanStd accuracy;
  MeanStd kappa;
  MeanStd weighted_mean_recall;
  MeanStd weighted_mean_precision;
  std::vector<LearnerSpec> learners;
  std::size_t fold_count = 0;
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::size_t attributes = 0;
};

struct CvOptions {
  // Drop test instances that duplicate a training instance (relevant after up-sampling).
  bool strict_dedup = false;
  // 0 = hardware concurrency. Results do not depend on the thread count.
  std::size_t threads = 0;
};

/// Stratified k-fold cross-validation of the majority vote over `learners`.
/// Fold k trains every learner with seed `seed + k`; the fold plan itself is
/// stratified_folds(d, folds, seed).
EvaluationReport cross_validate(const Dataset& d, std::span<const LearnerSpec> learners, std::size_t folds,
                                std::uint64_t seed, const CvOptions& options = {});

/// Recomputes the aggregate statistics from `report.folds`.
void aggregate(EvaluationReport& report);

}  // namespace rpm
