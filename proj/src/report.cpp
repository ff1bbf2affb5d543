#include "rpm/report.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rpm/error.hpp"

namespace rpm {

using nlohmann::ordered_json;

namespace {

std::string percent(const MeanStd& m) { return fmt::format("{:.2f}% +/- {:.2f}%", 100.0 * m.mean, 100.0 * m.std); }
std::string plain(const MeanStd& m) { return fmt::format("{:.3f} +/- {:.3f}", m.mean, m.std); }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

ordered_json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

ordered_json metrics_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy},
          {"kappa", m.kappa},
          {"weighted_mean_recall", m.weighted_mean_recall},
          {"weighted_mean_precision", m.weighted_mean_precision}};
}

ordered_json learners_json(const std::vector<LearnerSpec>& learners) {
  ordered_json out = ordered_json::array();
  for (const auto& l : learners) out.push_back(l.describe());
  return out;
}

ordered_json evaluation_json(const EvaluationReport& r) {
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) folds.push_back(metrics_json(f));
  return {{"instances", r.instances},
          {"attributes", r.attributes},
          {"folds", r.fold_count},
          {"seed", r.seed},
          {"learners", learners_json(r.learners)},
          {"accuracy", mean_std_json(r.accuracy)},
          {"kappa", mean_std_json(r.kappa)},
          {"weighted_mean_recall", mean_std_json(r.weighted_mean_recall)},
          {"weighted_mean_precision", mean_std_json(r.weighted_mean_precision)},
          {"per_fold", folds},
          {"pooled_confusion", {{"labels", r.pooled.labels}, {"counts", r.pooled.counts}}}};
}

ordered_json config_json(const PipelineConfig& c, std::size_t per_class_n) {
  return {{"per_class_n", per_class_n},
          {"top_v", c.top_v},
          {"folds", c.folds},
          {"max_levels", c.max_levels},
          {"kmeans_k", c.kmeans_k},
          {"kmeans_max_iter", c.kmeans_max_iter},
          {"kmeans_tol", c.kmeans_tol},
          {"kmeans_restarts", c.kmeans_restarts},
          {"normalize", c.normalize},
          {"bins", c.bins},
          {"loop_rule", std::string(to_string(c.loop_rule))},
          {"learners", learners_json(c.learners)},
          {"cluster_learner", c.cluster_learner.describe()},
          {"rule_learner", c.rule_learner.describe()},
          {"pca", {{"variance_to_keep", c.pca.variance_to_keep}, {"standardize", c.pca.standardize}}},
          {"strict_dedup", c.cv.strict_dedup}};
}

ordered_json rule_json(const Rule& r) {
  ordered_json conditions = ordered_json::array();
  for (const auto& c : r.conditions) {
    ordered_json j = {{"attribute", c.attribute}};
    switch (c.comparator) {
      case Comparator::less_equal: j["op"] = "<="; j["threshold"] = c.threshold; break;
      case Comparator::greater: j["op"] = ">"; j["threshold"] = c.threshold; break;
      case Comparator::in_set: j["op"] = "in"; j["categories"] = c.categories; break;
    }
    conditions.push_back(std::move(j));
  }
  return {{"text", format_rule(r)},
          {"conditions", conditions},
          {"class", r.predicted_class},
          {"support", r.support},
          {"confidence", r.confidence}};
}

ordered_json level_json(const LevelTrace& t) {
  ordered_json scores = ordered_json::array();
  for (const auto& s : t.cluster_scores) {
    scores.push_back({{"cluster", s.cluster}, {"attributes", s.attributes}, {"accuracy", mean_std_json(s.accuracy)}});
  }
  ordered_json weights = ordered_json::array();
  for (const auto& w : t.weights.weights) weights.push_back({{"attribute", w.name}, {"chi_square", w.chi_square}});
  return {{"level", t.level},
          {"input_attributes", t.input_attributes},
          {"cluster_scores", scores},
          {"chosen_cluster", t.chosen_cluster},
          {"chi_square", weights},
          {"selected", t.selected},
          {"evaluation", evaluation_json(t.report)}};
}

MeanStd read_mean_std(const nlohmann::json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::text;
  if (name == "json" || name == "json-like") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

std::string render_metric_table(const EvaluationReport& r) {
  std::string out = "Parameter\tResult\n";
  out += "Accuracy:\t" + percent(r.accuracy) + "\n";
  out += "Kappa :\t" + plain(r.kappa) + "\n";
  out += "Weighted Mean Recall:\t" + percent(r.weighted_mean_recall) + "\n";
  out += "Weighted Mean Precision:\t" + percent(r.weighted_mean_precision) + "\n";
  return out;
}

std::string render_text(const PipelineResult& result) {
  std::string out;
  out += fmt::format("Run: {}\n", result.name.empty() ? "unnamed" : result.name);
  out += fmt::format("Seed: {}\n", result.seed);
  out += fmt::format("Balanced instances: {} ({} per class)\n", result.balanced_instances, result.per_class_n);
  out += fmt::format("Loop rule: {}\n\n", to_string(result.config.loop_rule));

  out += "Levels\n";
  for (const auto& t : result.levels) {
    out += fmt::format("  level {}: {} attributes in, {} clusters, chosen cluster {} attributes, accuracy {:.2f}%\n",
                       t.level, t.input_attributes.size(), t.cluster_scores.size(), t.chosen_cluster.size(),
                       100.0 * t.report.accuracy.mean);
  }
  out += fmt::format("Final level: {}\n", result.final_level);
  out += fmt::format("Selected attributes ({}): {}\n\n", result.final_attributes.size(), join(result.final_attributes));

  out += "RPM\n" + render_metric_table(result.final_report) + "\n";
  if (result.baseline) out += "PCA\n" + render_metric_table(*result.baseline) + "\n";

  if (result.rules.empty()) {
    out += "Rules: none\n";
  } else {
    out += fmt::format("Rules ({})\n", result.rules.size());
    for (std::size_t i = 0; i < result.rules.size(); ++i) {
      const auto& r = result.rules[i];
      out += fmt::format("  {}. {} (support {}, confidence {:.3f})\n", i + 1, format_rule(r), r.support, r.confidence);
    }
  }
  if (!result.notes.empty()) {
    out += "\nNotes\n";
    for (const auto& n : result.notes) out += "  - " + n + "\n";
  }
  return out;
}

std::string render_json(const PipelineResult& result) {
  ordered_json levels = ordered_json::array();
  for (const auto& t : result.levels) levels.push_back(level_json(t));
  ordered_json rules = ordered_json::array();
  for (const auto& r : result.rules) rules.push_back(rule_json(r));
  ordered_json j = {{"report", "rpm"},
                    {"version", 1},
                    {"name", result.name},
                    {"seed", result.seed},
                    {"config", config_json(result.config, result.per_class_n)},
                    {"balanced_instances", result.balanced_instances},
                    {"levels", levels},
                    {"final_level", result.final_level},
                    {"final_attributes", result.final_attributes},
                    {"final", evaluation_json(result.final_report)},
                    {"baseline", result.baseline ? evaluation_json(*result.baseline) : ordered_json(nullptr)},
                    {"rules", rules},
                    {"notes", result.notes}};
  return j.dump(2) + "\n";
}

std::string render(const PipelineResult& result, ReportFormat format) {
  return format == ReportFormat::text ? render_text(result) : render_json(result);
}

void write_output(const std::filesystem::path& path, std::string_view content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void emit_report(const PipelineResult& result, ReportFormat format, const std::filesystem::path& path) {
  write_output(path, render(result, format));
}

ReportSummary parse_report_summary(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("report", "") != "rpm") throw DataError("not an rpm report");
    ReportSummary s;
    s.name = j.at("name").get<std::string>();
    s.final_level = j.at("final_level").get<std::size_t>();
    s.attributes = j.at("final_attributes").size();
    const auto& f = j.at("final");
    s.accuracy = read_mean_std(f.at("accuracy"));
    s.kappa = read_mean_std(f.at("kappa"));
    s.weighted_mean_recall = read_mean_std(f.at("weighted_mean_recall"));
    s.weighted_mean_precision = read_mean_std(f.at("weighted_mean_precision"));
    if (const auto& b = j.at("baseline"); !b.is_null()) {
      s.baseline_accuracy = read_mean_std(b.at("accuracy"));
      s.baseline_kappa = read_mean_std(b.at("kappa"));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string render_comparison(std::span<const ReportSummary> summaries) {
  std::string out = "Run\tAttributes\tRPM Accuracy\tPCA Accuracy\tRPM Kappa\tPCA Kappa\tKappa Gap\n";
  for (const auto& s : summaries) {
    const std::string pca_acc = s.baseline_accuracy ? percent(*s.baseline_accuracy) : "-";
    const std::string pca_kappa = s.baseline_kappa ? plain(*s.baseline_kappa) : "-";
    const std::string gap = s.baseline_kappa ? fmt::format("{:.3f}", s.kappa.mean - s.baseline_kappa->mean) : "-";
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", s.name, s.attributes, percent(s.accuracy), pca_acc, plain(s.kappa),
                       pca_kappa, gap);
  }
  return out;
}

}  // namespace rpm
