#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpm/attribute_clustering.hpp"
#include "rpm/dataset.hpp"
#include "rpm/ensemble_eval.hpp"
#include "rpm/feature_ranking.hpp"
#include "rpm/learners.hpp"

namespace rpm {

enum class LoopRule {
  improvement,    // iterate while mean accuracy strictly improves; keep the best level
  paper_literal,  // iterate while accuracy drops (or at level 1)
};

std::string_view to_string(LoopRule rule);
LoopRule parse_loop_rule(std::string_view name);

struct PipelineConfig {
  std::size_t per_class_n = 0;  // 0 = size of the majority class
  std::size_t top_v = 12;
  std::size_t folds = 10;
  std::size_t max_levels = 5;
  std::size_t kmeans_k = 0;     // 0 = number of target classes
  std::size_t kmeans_max_iter = 300;
  double kmeans_tol = 0.0;
  std::size_t kmeans_restarts = 10;
  bool normalize = true;
  std::size_t bins = 10;
  std::vector<LearnerSpec> learners;
  LearnerSpec cluster_learner = LearnerSpec::cart();
  LearnerSpec rule_learner = LearnerSpec::cart();
  LoopRule loop_rule = LoopRule::improvement;
  PcaOptions pca;
  CvOptions cv;
  std::uint64_t seed = 42;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct LevelTrace {
  std::size_t level = 1;
  std::vector<std::string> input_attributes;
  std::vector<ClusterScore> cluster_scores;
  std::vector<std::string> chosen_cluster;
  AttributeWeights weights;
  std::vector<std::string> selected;
  EvaluationReport report;
};

enum class Comparator { less_equal, greater, in_set };

struct Condition {
  std::string attribute;
  Comparator comparator = Comparator::less_equal;
  double threshold = 0.0;
  std::vector<std::string> categories;  // in_set only
};

struct Rule {
  std::vector<Condition> conditions;
  std::string predicted_class;
  std::size_t support = 0;
  double confidence = 0.0;
};

/// True when every condition holds for row `r` of `d`.
bool rule_matches(const Rule& rule, const Dataset& d, std::size_t r);
std::string format_rule(const Rule& rule);

struct PipelineResult {
  std::string name;  // run label, e.g. the recipe id
  PipelineConfig config;
  std::vector<LevelTrace> levels;
  std::size_t final_level = 1;  // 1-based index into levels
  EvaluationReport final_report;
  std::vector<std::string> final_attributes;
  std::vector<Rule> rules;
  std::optional<EvaluationReport> baseline;
  std::vector<std::string> notes;
  std::size_t balanced_instances = 0;
  std::size_t per_class_n = 0;
  std::uint64_t seed = 0;
};

/// Balance, then repeat transpose / k-means / CART cluster choice /
/// chi-square top-v / ensemble cross-validation per level, then extract
/// rules from the final reduced dataset.
PipelineResult run_rpm(const Dataset& d, const PipelineConfig& cfg);

/// Impute, PCA on the raw (unbalanced) data, then the same ensemble
/// cross-validation as run_rpm.
EvaluationReport run_pca_baseline(const Dataset& d, const PipelineConfig& cfg);

/// One rule per leaf of a CART tree grown on all of `d_f`, ordered by support
/// descending (ties keep tree order).
std::vector<Rule> generate_rules(const Dataset& d_f, const PipelineConfig& cfg);

/// Seeds used for each stage, all derived from cfg.seed.
struct SeedPlan {
  std::uint64_t master = 0;
  std::uint64_t balance = 0;
  std::uint64_t cv = 0;  // shared by cluster scoring, ensemble CV and the baseline

  std::uint64_t kmeans(std::size_t level) const;
};
SeedPlan seed_plan(std::uint64_t master);

}  // namespace rpm
