#include "rpm/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "rpm/error.hpp"
#include "rpm/log.hpp"
#include "rpm/random.hpp"
#include "rpm/sampling.hpp"

namespace rpm {

std::string_view to_string(LoopRule rule) {
  return rule == LoopRule::improvement ? "improvement" : "paper-literal";
}

LoopRule parse_loop_rule(std::string_view name) {
  if (name == "improvement") return LoopRule::improvement;
  if (name == "paper-literal" || name == "paper_literal") return LoopRule::paper_literal;
  throw ConfigError("unknown loop rule '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (max_levels == 0) throw ConfigError("max_levels must be at least 1");
  if (top_v == 0) throw ConfigError("top_v must be at least 1");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (bins == 0) throw ConfigError("bins must be at least 1");
  if (kmeans_max_iter == 0) throw ConfigError("kmeans max_iter must be at least 1");
  if (!(kmeans_tol >= 0.0)) throw ConfigError("kmeans tolerance must be non-negative");
  if (learners.empty()) throw ConfigError("the ensemble needs at least one learner");
  for (const auto& l : learners) l.validate();
  cluster_learner.validate();
  rule_learner.validate();
}

SeedPlan seed_plan(std::uint64_t master) {
  SeedPlan plan{};
  plan.master = master;
  plan.balance = derive_seed(master, 1);
  plan.cv = master;
  return plan;
}

std::uint64_t SeedPlan::kmeans(std::size_t level) const { return derive_seed(master, 100 + level); }

bool rule_matches(const Rule& rule, const Dataset& d, std::size_t r) {
  for (const auto& c : rule.conditions) {
    const std::size_t col = d.index_of(c.attribute);
    const double v = d.at(r, col);
    switch (c.comparator) {
      case Comparator::less_equal:
        if (!(v <= c.threshold)) return false;
        break;
      case Comparator::greater:
        if (!(v > c.threshold)) return false;
        break;
      case Comparator::in_set: {
        const auto& label = d.attribute(col).categories.at(static_cast<std::size_t>(v));
        if (std::find(c.categories.begin(), c.categories.end(), label) == c.categories.end()) return false;
        break;
      }
    }
  }
  return true;
}

std::string format_rule(const Rule& rule) {
  std::ostringstream out;
  out << "IF ";
  if (rule.conditions.empty()) out << "TRUE";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const auto& c = rule.conditions[i];
    if (i) out << " AND ";
    out << c.attribute;
    if (c.comparator == Comparator::in_set) {
      out << " in {";
      for (std::size_t j = 0; j < c.categories.size(); ++j) out << (j ? ", " : "") << c.categories[j];
      out << "}";
    } else {
      out << (c.comparator == Comparator::less_equal ? " <= " : " > ") << c.threshold;
    }
  }
  out << " THEN " << rule.predicted_class;
  return out.str();
}

namespace {

// Adds a condition, tightening an existing one on the same attribute and comparator.
void add_condition(std::vector<Condition>& conditions, Condition c) {
  for (auto& existing : conditions) {
    if (existing.attribute != c.attribute || existing.comparator != c.comparator) continue;
    switch (c.comparator) {
      case Comparator::less_equal: existing.threshold = std::min(existing.threshold, c.threshold); return;
      case Comparator::greater: existing.threshold = std::max(existing.threshold, c.threshold); return;
      case Comparator::in_set: {
        std::vector<std::string> both;
        for (const auto& cat : existing.categories) {
          if (std::find(c.categories.begin(), c.categories.end(), cat) != c.categories.end()) both.push_back(cat);
        }
        existing.categories = std::move(both);
        return;
      }
    }
  }
  conditions.push_back(std::move(c));
}

void collect_rules(const Tree& tree, const TrainingData& data, std::size_t id, std::vector<Condition> path,
                   std::vector<Rule>& out) {
  const auto& node = tree.nodes[id];
  if (node.leaf) {
    Rule rule;
    rule.conditions = std::move(path);
    rule.predicted_class = data.class_labels[node.prediction];
    rule.support = node.count();
    rule.confidence = rule.support ? static_cast<double>(node.class_counts[node.prediction]) / static_cast<double>(rule.support) : 0.0;
    out.push_back(std::move(rule));
    return;
  }
  const auto& attr = data.attributes[node.attribute];
  Condition left{attr.name, Comparator::less_equal, node.threshold, {}};
  Condition right{attr.name, Comparator::greater, node.threshold, {}};
  if (node.nominal) {
    left = {attr.name, Comparator::in_set, 0.0, {attr.categories[node.category]}};
    right = {attr.name, Comparator::in_set, 0.0, {}};
    for (std::size_t c = 0; c < attr.categories.size(); ++c) {
      if (c != node.category) right.categories.push_back(attr.categories[c]);
    }
  }
  auto left_path = path;
  add_condition(left_path, std::move(left));
  collect_rules(tree, data, static_cast<std::size_t>(node.left), std::move(left_path), out);
  add_condition(path, std::move(right));
  collect_rules(tree, data, static_cast<std::size_t>(node.right), std::move(path), out);
}

double mean_accuracy(const LevelTrace& t) { return t.report.accuracy.mean; }

}  // namespace

std::vector<Rule> generate_rules(const Dataset& d_f, const PipelineConfig& cfg) {
  if (d_f.num_rows() == 0) throw DataError("cannot generate rules from an empty dataset");
  const TrainingData data = make_training_data(d_f);
  LearnerSpec spec = cfg.rule_learner;
  spec.algorithm = Algorithm::cart;
  const TrainedModel model = train_cart(data, spec);
  std::vector<Rule> rules;
  collect_rules(*model.tree(), data, 0, {}, rules);
  std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.support > b.support; });
  return rules;
}

PipelineResult run_rpm(const Dataset& d, const PipelineConfig& cfg) {
  cfg.validate();
  const SeedPlan seeds = seed_plan(cfg.seed);
  PipelineResult result;
  result.config = cfg;
  result.seed = cfg.seed;

  Dataset raw = d;
  if (raw.has_missing()) {
    raw = impute_missing(raw);
    result.notes.push_back("missing values imputed (numeric mean, nominal mode)");
  }
  const auto counts = raw.class_counts();
  const std::size_t present = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  const std::size_t per_class = cfg.per_class_n ? cfg.per_class_n : *std::max_element(counts.begin(), counts.end());
  const Dataset balanced = bootstrap_balance(raw, per_class, seeds.balance).with_provenance("D_1");
  result.per_class_n = per_class;
  result.balanced_instances = balanced.num_rows();
  if (std::any_of(counts.begin(), counts.end(), [&](auto c) { return c < per_class; }) && !cfg.cv.strict_dedup) {
    result.notes.push_back("minority classes were up-sampled with replacement; duplicate rows can fall in both training and test folds");
  }
  result.notes.push_back("attribute selection used the full balanced dataset before cross-validation");

  const std::size_t k = cfg.kmeans_k ? cfg.kmeans_k : present;
  std::vector<std::string> current = balanced.regular_names();
  bool stopped_by_rule = false;

  for (std::size_t level = 1; level <= cfg.max_levels; ++level) {
    LevelTrace trace;
    trace.level = level;
    trace.input_attributes = current;
    const Dataset level_data = project_attributes(balanced, current).with_provenance("D_1 level " + std::to_string(level));

    const AttributeMatrix matrix = transpose(level_data, cfg.normalize);
    KMeansOptions km;
    km.k = std::min(k, matrix.num_rows());
    km.seed = seeds.kmeans(level);
    km.max_iter = cfg.kmeans_max_iter;
    km.tol = cfg.kmeans_tol;
    km.restarts = cfg.kmeans_restarts;
    const ClusterAssignment assignment = kmeans(matrix, km);
    const auto clusters = split_by_cluster(level_data, assignment);

    ClusterScoring scoring;
    scoring.folds = cfg.folds;
    scoring.learner = cfg.cluster_learner;
    scoring.cv = cfg.cv;
    const ClusterChoice choice = pick_best_cluster(clusters, seeds.cv, scoring);
    const ClusterDataset& chosen = clusters[choice.index];
    if (level == 1 && chosen.attributes.size() < 2) {
      throw Error("the best level-1 cluster has " + std::to_string(chosen.attributes.size()) +
                  " attribute; attribute clustering cannot proceed");
    }
    trace.cluster_scores = choice.scores;
    trace.chosen_cluster = chosen.attributes;
    trace.weights = chi_square_weights(chosen.data, cfg.bins);
    trace.selected = top_v_names(trace.weights, cfg.top_v);
    const Dataset reduced = project_attributes(chosen.data, trace.selected);
    trace.report = cross_validate(reduced, cfg.learners, cfg.folds, seeds.cv, cfg.cv);
    log::info("level " + std::to_string(level) + ": " + std::to_string(trace.selected.size()) +
              " attributes, accuracy " + std::to_string(trace.report.accuracy.mean));
    result.levels.push_back(std::move(trace));

    const auto& latest = result.levels.back();
    if (level > 1) {
      const double prev = mean_accuracy(result.levels[level - 2]);
      const double now = mean_accuracy(latest);
      const bool go_on = cfg.loop_rule == LoopRule::improvement ? now > prev : now < prev;
      if (!go_on) {
        stopped_by_rule = true;
        break;
      }
    }
    if (level == cfg.max_levels) break;
    if (latest.chosen_cluster.size() < 2 * k) {
      result.notes.push_back("stopped after level " + std::to_string(level) + ": chosen cluster has fewer than " +
                             std::to_string(2 * k) + " attributes");
      break;
    }
    if (latest.chosen_cluster.size() >= current.size()) {
      result.notes.push_back("stopped after level " + std::to_string(level) + ": clustering did not reduce the attribute set");
      break;
    }
    current = latest.chosen_cluster;
  }

  std::size_t final_index = result.levels.size() - 1;
  if (cfg.loop_rule == LoopRule::improvement) {
    for (std::size_t i = 0; i < result.levels.size(); ++i) {
      if (mean_accuracy(result.levels[i]) > mean_accuracy(result.levels[final_index]) ||
          (mean_accuracy(result.levels[i]) == mean_accuracy(result.levels[final_index]) && i < final_index)) {
        final_index = i;
      }
    }
  } else if (stopped_by_rule) {
    final_index = result.levels.size() - 2;
  }
  result.final_level = final_index + 1;
  const auto& best = result.levels[final_index];
  result.final_report = best.report;
  result.final_attributes = best.selected;
  result.rules = generate_rules(project_attributes(balanced, best.selected).with_provenance("D_f"), cfg);
  return result;
}

EvaluationReport run_pca_baseline(const Dataset& d, const PipelineConfig& cfg) {
  cfg.validate();
  const SeedPlan seeds = seed_plan(cfg.seed);
  const Dataset raw = impute_missing(d);
  const Dataset reduced = pca_reduce(raw, cfg.pca);
  return cross_validate(reduced, cfg.learners, cfg.folds, seeds.cv, cfg.cv);
}

}  // namespace rpm
