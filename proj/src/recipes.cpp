#include "rpm/recipes.hpp"

#include <algorithm>
#include <charconv>

#include "rpm/error.hpp"
#include "rpm/log.hpp"

namespace rpm {

namespace {

std::vector<LearnerSpec> learner_set(std::initializer_list<Algorithm> algorithms) {
  std::vector<LearnerSpec> out;
  for (auto a : algorithms) {
    switch (a) {
      case Algorithm::cart: out.push_back(LearnerSpec::cart()); break;
      case Algorithm::random_tree: out.push_back(LearnerSpec::random_tree()); break;
      case Algorithm::random_forest: out.push_back(LearnerSpec::random_forest()); break;
      case Algorithm::knn: out.push_back(LearnerSpec::knn()); break;
      case Algorithm::kstar: out.push_back(LearnerSpec::kstar()); break;
      case Algorithm::vote: throw ConfigError("a vote cannot be a member of a recipe ensemble");
    }
  }
  return out;
}

std::vector<Recipe> build_recipes() {
  std::vector<Recipe> out;

  Recipe a;
  a.id = "A";
  a.description = "Epileptic seizure recognition, seizure (y=1) vs rest";
  a.target = "y";
  a.drop_unnamed_columns = true;
  a.target_map = {TargetMap::Kind::one_vs_rest, "1", 0.0, "1", "0"};
  a.per_class_n = 5000;
  a.learners = learner_set({Algorithm::random_tree, Algorithm::kstar, Algorithm::cart, Algorithm::random_forest});
  out.push_back(a);

  Recipe b;
  b.delimiter = ';';
  b.target = "G3";
  b.drop_columns = {"G1", "G2"};
  b.target_map = {TargetMap::Kind::at_least, "", 10.0, "PASS", "FAIL"};
  b.learners = learner_set({Algorithm::random_tree, Algorithm::kstar, Algorithm::cart, Algorithm::random_forest});
  b.substitutions = {"LMT is not implemented; CART takes its place in the ensemble"};
  Recipe por = b;
  por.id = "B-por";
  por.description = "Student performance (Portuguese), PASS iff G3 >= 10";
  por.per_class_n = 300;
  out.push_back(por);
  Recipe mat = b;
  mat.id = "B-mat";
  mat.description = "Student performance (Mathematics), PASS iff G3 >= 10";
  mat.per_class_n = 200;
  out.push_back(mat);

  Recipe c;
  c.id = "C";
  c.description = "Turkiye student evaluation, target nb.repeat";
  c.target = "nb.repeat";
  c.per_class_n = 2000;
  c.learners = learner_set({Algorithm::random_tree, Algorithm::knn});
  out.push_back(c);

  Recipe d;
  d.id = "D";
  d.description = "Bank marketing, target y";
  d.delimiter = ';';
  d.target = "y";
  d.per_class_n = 15000;
  d.top_v = 6;
  d.learners = learner_set({Algorithm::kstar, Algorithm::knn});
  out.push_back(d);

  for (const char* year : {"1", "2", "5"}) {
    Recipe e;
    e.id = std::string("E") + year;
    e.description = std::string("Polish companies bankruptcy, year ") + year;
    e.format = SourceFormat::arff;
    e.target = "class";
    e.learners = learner_set({Algorithm::kstar, Algorithm::knn});
    out.push_back(e);
  }
  return out;
}

bool unnamed(const std::string& header) { return header.empty() || header.rfind("Unnamed", 0) == 0; }

void drop_column(RawTable& table, std::size_t col) {
  table.header.erase(table.header.begin() + static_cast<std::ptrdiff_t>(col));
  for (auto& row : table.rows) row.erase(row.begin() + static_cast<std::ptrdiff_t>(col));
}

std::string map_target(const TargetMap& map, const std::string& value) {
  switch (map.kind) {
    case TargetMap::Kind::keep: return value;
    case TargetMap::Kind::one_vs_rest:
      return value == map.positive || value == map.positive_label ? map.positive_label : map.negative_label;
    case TargetMap::Kind::at_least: {
      if (value == map.positive_label || value == map.negative_label) return value;
      double v = 0.0;
      const auto* end = value.data() + value.size();
      const auto [ptr, ec] = std::from_chars(value.data(), end, v);
      if (ec != std::errc() || ptr != end) throw DataError("target value '" + value + "' is not numeric");
      return v >= map.threshold ? map.positive_label : map.negative_label;
    }
  }
  return value;
}

}  // namespace

const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> all = build_recipes();
  return all;
}

const Recipe& find_recipe(std::string_view id) {
  for (const auto& r : recipes()) {
    if (r.id == id) return r;
  }
  std::string known;
  for (const auto& r : recipes()) known += (known.empty() ? "" : ", ") + r.id;
  throw ConfigError("unknown recipe '" + std::string(id) + "' (known: " + known + ")");
}

void preprocess(const Recipe& recipe, RawTable& table) {
  for (std::size_t c = table.header.size(); c-- > 0;) {
    const bool listed = std::find(recipe.drop_columns.begin(), recipe.drop_columns.end(), table.header[c]) !=
                        recipe.drop_columns.end();
    if (listed || (recipe.drop_unnamed_columns && unnamed(table.header[c]))) drop_column(table, c);
  }
  const auto target = table.column(recipe.target);
  if (!target) throw DataError("recipe " + recipe.id + " expects a target column '" + recipe.target + "'");
  for (auto& row : table.rows) row[*target] = map_target(recipe.target_map, row[*target]);
}

Dataset load_recipe_data(const Recipe& recipe, const std::filesystem::path& path) {
  SchemaOptions schema;
  schema.target = recipe.target;
  schema.provenance = path.filename().string();
  RawTable table;
  if (recipe.format == SourceFormat::arff) {
    ArffTable arff = read_arff(path);
    for (std::size_t c = 0; c < arff.nominal.size(); ++c) {
      if (arff.nominal[c] && (arff.table.header[c] != recipe.target || recipe.target_map.kind == TargetMap::Kind::keep)) {
        schema.declared_categories[arff.table.header[c]] = *arff.nominal[c];
      }
    }
    table = std::move(arff.table);
  } else {
    table = read_csv_table(path, CsvOptions{recipe.delimiter});
  }
  preprocess(recipe, table);
  Dataset d = build_dataset(table, schema);
  log::info("recipe " + recipe.id + ": " + std::to_string(d.num_rows()) + " rows, " +
            std::to_string(d.num_regular()) + " attributes");
  return d;
}

PipelineConfig recipe_config(const Recipe& recipe) {
  PipelineConfig cfg;
  cfg.per_class_n = recipe.per_class_n;
  cfg.top_v = recipe.top_v;
  cfg.learners = recipe.learners;
  return cfg;
}

PipelineConfig apply_overrides(PipelineConfig cfg, const RecipeOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.per_class_n) cfg.per_class_n = *o.per_class_n;
  if (o.top_v) cfg.top_v = *o.top_v;
  if (o.max_levels) cfg.max_levels = *o.max_levels;
  if (o.loop_rule) cfg.loop_rule = *o.loop_rule;
  if (o.threads) cfg.cv.threads = *o.threads;
  return cfg;
}

PipelineResult run_recipe(const Recipe& recipe, const Dataset& data, const RecipeOverrides& overrides) {
  const PipelineConfig cfg = apply_overrides(recipe_config(recipe), overrides);
  PipelineResult result = run_rpm(data, cfg);
  result.name = recipe.id;
  for (const auto& s : recipe.substitutions) result.notes.push_back(s);
  if (!overrides.skip_baseline) result.baseline = run_pca_baseline(data, cfg);
  return result;
}

}  // namespace rpm
