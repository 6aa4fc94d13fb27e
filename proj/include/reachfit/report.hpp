#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "reachfit/pipeline.hpp"

namespace reachfit {

enum class ReportFormat { Json, Csv, Markdown };

// Throws ConfigError for anything but json, csv or md.
ReportFormat parse_report_format(const std::string& name);

void write_json_report(std::ostream& out, const AnalysisResult& result);
void write_trials_csv(std::ostream& out, const AnalysisResult& result);
void write_summary_markdown(std::ostream& out, const AnalysisResult& result);

// report.json, trials.csv and summary.md in `dir` (created if missing), or
// only the requested one.
void write_reports(const AnalysisResult& result, const std::string& dir,
                   std::optional<ReportFormat> only = std::nullopt);

// Reads a report.json back; the summary is recomputed from the trials.
AnalysisResult parse_json_report(std::istream& in);
AnalysisResult load_report(const std::string& path);

}  // namespace reachfit
