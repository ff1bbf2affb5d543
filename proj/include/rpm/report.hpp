#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpm/pipeline.hpp"

namespace rpm {

enum class ReportFormat { text, json };

/// Accepts "text", "json" and "json-like".
ReportFormat parse_report_format(std::string_view name);

/// Four-row "Parameter / Result" table: percentages for accuracy, recall and
/// precision, three decimals for kappa.
std::string render_metric_table(const EvaluationReport& report);

std::string render_text(const PipelineResult& result);
/// Complete machine-readable record: config, seeds, level traces, rules, notes.
std::string render_json(const PipelineResult& result);
std::string render(const PipelineResult& result, ReportFormat format);

/// Writes `content` to `path`, or to stdout when `path` is empty or "-".
/// Throws Error when the file cannot be written.
void write_output(const std::filesystem::path& path, std::string_view content);

void emit_report(const PipelineResult& result, ReportFormat format, const std::filesystem::path& path);

/// Headline numbers read back from a machine-readable report.
struct ReportSummary {
  std::string name;
  std::size_t final_level = 0;
  std::size_t attributes = 0;
  MeanStd accuracy, kappa, weighted_mean_recall, weighted_mean_precision;
  std::optional<MeanStd> baseline_accuracy, baseline_kappa;
};

ReportSummary parse_report_summary(std::string_view json_text);

/// Tab-separated RPM-vs-PCA table, one row per report.
std::string render_comparison(std::span<const ReportSummary> summaries);

}  // namespace rpm
