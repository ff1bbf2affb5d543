// rpm: run a dataset recipe through the reduction pipeline, or compare reports.
#include <CLI11.hpp>
#include <iostream>

#include "rpm/error.hpp"
#include "rpm/io.hpp"
#include "rpm/log.hpp"
#include "rpm/recipes.hpp"
#include "rpm/report.hpp"

namespace {

struct RunArgs {
  std::string recipe;
  std::string data;
  std::string out;
  std::string format = "text";
  std::string loop_rule;
  std::uint64_t seed = 0;
  std::size_t per_class = 0;
  std::size_t top_v = 0;
  std::size_t max_levels = 0;
  std::size_t threads = 0;
  bool skip_baseline = false;
};

int run(const RunArgs& args, CLI::App& cmd) {
  const rpm::Recipe& recipe = rpm::find_recipe(args.recipe);
  const auto format = rpm::parse_report_format(args.format);
  rpm::RecipeOverrides o;
  if (cmd.count("--seed")) o.seed = args.seed;
  if (cmd.count("--per-class")) o.per_class_n = args.per_class;
  if (cmd.count("--top-v")) o.top_v = args.top_v;
  if (cmd.count("--max-levels")) o.max_levels = args.max_levels;
  if (!args.loop_rule.empty()) o.loop_rule = rpm::parse_loop_rule(args.loop_rule);
  if (cmd.count("--threads")) o.threads = args.threads;
  o.skip_baseline = args.skip_baseline;

  const rpm::Dataset data = rpm::load_recipe_data(recipe, args.data);
  rpm::emit_report(rpm::run_recipe(recipe, data, o), format, args.out);
  return 0;
}

int compare(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<rpm::ReportSummary> rows;
  for (const auto& p : paths) {
    try {
      rows.push_back(rpm::parse_report_summary(rpm::read_text_file(p)));
    } catch (const rpm::Error& e) {
      throw rpm::DataError(p + ": " + e.what());
    }
  }
  rpm::write_output(out, rpm::render_comparison(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-cluster reduction pipeline with ensemble evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "debug, info or warn")->check(CLI::IsMember({"debug", "info", "warn"}));

  RunArgs args;
  auto* run_cmd = app.add_subcommand("run", "Run a recipe and write a report");
  run_cmd->add_option("--recipe", args.recipe, "A, B-por, B-mat, C, D, E1, E2 or E5")->required();
  run_cmd->add_option("--data", args.data, "Dataset file (CSV, or ARFF for E recipes)")->required();
  run_cmd->add_option("--seed", args.seed, "Master seed (default 42)");
  run_cmd->add_option("--per-class", args.per_class, "Instances per class after balancing")->check(CLI::PositiveNumber);
  run_cmd->add_option("--top-v", args.top_v, "Attributes kept by chi-square ranking")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-levels", args.max_levels, "Upper bound on clustering levels")->check(CLI::PositiveNumber);
  run_cmd->add_option("--loop-rule", args.loop_rule, "improvement or paper-literal")
      ->check(CLI::IsMember({"improvement", "paper-literal"}));
  run_cmd->add_flag("--skip-baseline", args.skip_baseline, "Do not run the PCA baseline");
  run_cmd->add_option("--out", args.out, "Report path (default stdout)");
  run_cmd->add_option("--format", args.format, "text or json-like")->check(CLI::IsMember({"text", "json-like", "json"}));
  run_cmd->add_option("--threads", args.threads, "Cross-validation workers, 0 = all cores");

  std::vector<std::string> reports;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate RPM against PCA across machine-readable reports");
  compare_cmd->add_option("reports", reports, "Report files")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", compare_out, "Table path (default stdout)");

  auto* list_cmd = app.add_subcommand("recipes", "List the built-in recipes");

  CLI11_PARSE(app, argc, argv);
  rpm::log::set_level(log_level == "debug" ? rpm::log::Level::debug
                      : log_level == "info" ? rpm::log::Level::info
                                            : rpm::log::Level::warn);
  try {
    if (*run_cmd) return run(args, *run_cmd);
    if (*compare_cmd) return compare(reports, compare_out);
    if (*list_cmd) {
      for (const auto& r : rpm::recipes()) std::cout << r.id << "\t" << r.description << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "rpm: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
