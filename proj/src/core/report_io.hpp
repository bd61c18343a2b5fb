#pragma once

#include <string>
#include <string_view>

#include "core/solvers.hpp"

namespace mlbicgstabt {

enum class ReportFormat { Csv, Json };

/// "csv" or "json"; throws std::invalid_argument otherwise.
ReportFormat parse_report_format(std::string_view name);

/// Header `k,relative_residual` (plus `,true_error` when the true-error
/// history was tracked), then one row per k = 0 .. iterations. Numbers are
/// printed with 17 significant digits.
std::string report_to_csv(const ConvergenceReport& report);

/// Full report. Non-finite numbers are written as the strings "NaN",
/// "Infinity" and "-Infinity"; complex values as [re, im].
std::string report_to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(std::string_view text);

std::string format_report(const ConvergenceReport& report, ReportFormat format);

/// Writes the formatted report to `path`; throws IoError.
void write_report(const ConvergenceReport& report, ReportFormat format, const std::string& path);

}  // namespace mlbicgstabt
