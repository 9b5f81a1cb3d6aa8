#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace brl {

// A parsed CSV with optional "# key=value ..." provenance lines before the
// header. Cells are kept as text; numeric columns are parsed on demand.
struct CsvTable {
  std::string source;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

// Throws ParseError naming the source and line on malformed input.
CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

// "key=value key=value" (no leading '#').
std::map<std::string, std::string> parse_provenance(const std::string& line);

struct Band {
  std::vector<std::string> x;  // category labels or formatted numbers
  std::vector<double> xs;      // numeric x when the chart is a line chart
  std::vector<double> mean, min, max;
};

// Aggregates column `metric` across runs: per x value, mean/min/max over the
// runs that have a finite value there. Line charts sort x numerically, bar
// charts keep first-appearance order.
Band aggregate(const std::vector<CsvTable>& runs, const std::string& metric, bool numeric_x);

// Standalone SVG 1.1 for one metric: a polyline of the mean (plus a min-max
// polygon band for several runs), or bars for categorical x.
std::string render_svg(const Band& band, const std::string& metric, const std::string& x_label,
                       bool numeric_x, bool with_band);

// Reads the CSVs, refuses mismatched env/reward provenance, and writes one SVG
// per metric column into `out_dir`. Returns the written paths. Nothing is
// written if any input fails to parse or has no data rows.
std::vector<std::filesystem::path> emit_report(const std::vector<std::filesystem::path>& inputs,
                                               const std::filesystem::path& out_dir);

}  // namespace brl
