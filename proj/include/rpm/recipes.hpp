#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rpm/io.hpp"
#include "rpm/pipeline.hpp"

namespace rpm {

enum class SourceFormat { csv, arff };

/// How the raw target column is mapped to class labels.
struct TargetMap {
  enum class Kind {
    keep,
    one_vs_rest,  // `positive` -> positive_label, every other value -> negative_label
    at_least,     // numeric value >= threshold -> positive_label, else negative_label
  };
  Kind kind = Kind::keep;
  std::string positive;
  double threshold = 0.0;
  std::string positive_label;
  std::string negative_label;
};

struct Recipe {
  std::string id;
  std::string description;
  SourceFormat format = SourceFormat::csv;
  char delimiter = ',';
  std::string target;
  std::vector<std::string> drop_columns;  // dropped when present
  bool drop_unnamed_columns = false;      // columns with an empty or "Unnamed..." header
  TargetMap target_map;
  std::size_t per_class_n = 0;  // 0 = majority class size
  std::size_t top_v = 12;
  std::vector<LearnerSpec> learners;
  std::vector<std::string> substitutions;
};

const std::vector<Recipe>& recipes();
/// Throws ConfigError for an unknown id.
const Recipe& find_recipe(std::string_view id);

/// Applies drop and target directives in place. Throws DataError when the
/// target column is absent or a target value cannot be mapped. Running it
/// twice gives the same table.
void preprocess(const Recipe& recipe, RawTable& table);

Dataset load_recipe_data(const Recipe& recipe, const std::filesystem::path& path);

PipelineConfig recipe_config(const Recipe& recipe);

struct RecipeOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> per_class_n;
  std::optional<std::size_t> top_v;
  std::optional<std::size_t> max_levels;
  std::optional<LoopRule> loop_rule;
  std::optional<std::size_t> threads;
  bool skip_baseline = false;
};

PipelineConfig apply_overrides(PipelineConfig cfg, const RecipeOverrides& overrides);

/// run_rpm plus, unless skipped, run_pca_baseline on the same data and seed.
PipelineResult run_recipe(const Recipe& recipe, const Dataset& data, const RecipeOverrides& overrides = {});

}  // namespace rpm
