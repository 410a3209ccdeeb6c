#ifndef XRAYSEGKIT_REPORT_HPP_
#define XRAYSEGKIT_REPORT_HPP_

#include <xraysegkit/metrics.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace xraysegkit {

/// Header of report.csv, in the column order of the evaluation table.
std::string report_csv_header();
std::string report_csv(const MetricsReport& report);

/// Fixed-width text table (three decimals) with the confidence
/// thresholds used for P and R.
std::string format_report_table(const MetricsReport& report);

std::string confusion_matrix_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names);

/// Long format: `series,x,y`.
std::string curve_csv(const CurveSeries& curve);

/// Self-contained SVG line plot of every series in the curve.
std::string curve_svg(const CurveSeries& curve, const std::string& title);

/**
 * Writes report.csv, report.txt, confusion_matrix.csv and, per curve,
 * `<prefix>curve_<kind>.csv` and `.svg`. `curve_sets` pairs a file prefix
 * with the curves to write under it.
 */
void write_report(const MetricsReport& report, const ConfusionMatrix& matrix,
                  const std::vector<std::pair<std::string, std::vector<CurveSeries>>>& curve_sets,
                  const std::vector<std::string>& class_names, const std::filesystem::path& out_dir);

/// Writes text to `path` via a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace xraysegkit

#endif  // XRAYSEGKIT_REPORT_HPP_
