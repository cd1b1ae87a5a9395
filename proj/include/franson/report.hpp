#pragma once

// Tabular output (CSV / JSON) and a small hand-written SVG phase plot.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace franson::report {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// Numbers are written with 12 significant digits.
std::string format_number(double v);

/// Header comment line "# generated <UTC time>" when `timestamp` is set,
/// then the column header and one line per row.
std::string to_csv(const Table& table, const std::optional<std::string>& timestamp);

/// {"generated": ..., "columns": [...], "rows": [{...}, ...]}; `generated`
/// only when a timestamp is given.
std::string to_json(const Table& table, const std::optional<std::string>& timestamp);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

struct PlotPoint {
  double x;
  double y;
  bool pass = true;
};

struct PhasePlot {
  std::string title;
  std::string x_label = "lambda_A (nm)";
  std::string y_label = "phi (rad)";
  double threshold = 0.14;     // corridor half-width, shaded
  std::vector<PlotPoint> curve;    // drawn as a polyline
  std::vector<PlotPoint> markers;  // drawn as dots, colored by pass
};

std::string to_svg(const PhasePlot& plot);

}  // namespace franson::report
