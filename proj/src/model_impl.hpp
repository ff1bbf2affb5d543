#pragma once

#include <atomic>
#include <span>
#include <string>
#include <vector>

#include "rpm/learners.hpp"

namespace rpm::detail {

class ModelImpl {
 public:
  ModelImpl(Algorithm algorithm, const TrainingData& data);
  // For composite models whose members already sanitize their inputs.
  ModelImpl(Algorithm algorithm, std::vector<std::string> labels, std::vector<std::size_t> counts, std::size_t arity);
  virtual ~ModelImpl() = default;

  virtual std::size_t predict_clean(std::span<const double> row) const = 0;
  virtual const Tree* tree() const { return nullptr; }
  virtual const std::vector<Tree>* forest() const { return nullptr; }

  /// Copies `row` into `scratch` with unseen or missing nominal values mapped
  /// to the training mode and missing numeric values to the training mean.
  std::span<const double> sanitize(std::span<const double> row, std::vector<double>& scratch) const;

  Algorithm algorithm;
  std::vector<std::string> labels;
  std::vector<std::size_t> counts;
  std::size_t arity = 0;

 private:
  bool guarded_ = false;
  std::vector<bool> nominal_;
  std::vector<std::vector<bool>> seen_;
  std::vector<double> fallback_;
  mutable std::atomic<bool> warned_{false};
};

}  // namespace rpm::detail
