#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wdistlab/adversarial.hpp"
#include "wdistlab/distances.hpp"

namespace wdistlab {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Rectangular table; every row has header.size() cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  /// Numeric column by name (int cells converted, strings rejected).
  std::vector<double> column(const std::string& name) const;
};

/// RFC 4180 CSV, LF line endings, reals at 17 significant digits.
std::string render_csv(const Table& table);
void write_csv(const Table& table, std::ostream& out);
void write_csv(const Table& table, const std::string& path);
/// Header and rows as raw strings.
std::vector<std::vector<std::string>> read_csv_cells(std::istream& in);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Standalone SVG line chart with axes, ticks and a legend. Each maximal run
/// of finite y values becomes one <polyline>; +inf values are drawn as
/// upward triangles (class "inf-marker") at the top edge, -inf as downward
/// triangles at the bottom edge.
std::string render_line_chart_svg(const std::vector<Series>& series, const ChartLabels& labels);
void render_line_chart(const std::vector<Series>& series, const ChartLabels& labels,
                       const std::string& path);

/// `iter,critic_loss,gen_loss,quality_w1,wallclock_ms`.
Table runlog_table(const RunLog& log);
nlohmann::json training_config_json(const TrainingConfig& config);
/// Writes the log CSV at `csv_path` and a JSON sidecar next to it (same stem,
/// .json) holding the configuration, seed and divergence status.
void write_runlog(const RunLog& log, const TrainingConfig& config, const std::string& csv_path);

/// Coupling entries with positive mass as `i,j,mass`.
Table transport_plan_table(const TransportPlan& plan);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace wdistlab
