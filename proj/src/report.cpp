#include "wdistlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wdistlab/numfmt.hpp"

namespace wdistlab {

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string render_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return quote_if_needed(std::get<std::string>(cell));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) return "0";
  return fmt(v, "%.3g");
}

// Roughly five "nice" tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
  return ticks;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header.size()) {
    throw std::invalid_argument("table: row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("table: no column " + name);
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  for (const auto& row : rows) {
    if (const auto* d = std::get_if<double>(&row[idx])) out.push_back(*d);
    else if (const auto* i = std::get_if<std::int64_t>(&row[idx])) out.push_back(static_cast<double>(*i));
    else throw std::invalid_argument("table: column " + name + " is not numeric");
  }
  return out;
}

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out.push_back(',');
    out += quote_if_needed(table.header[j]);
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("table is not rectangular");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out.push_back(',');
      out += render_cell(row[j]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Table& table, std::ostream& out) { out << render_csv(table); }

void write_text_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_csv(const Table& table, const std::string& path) { write_text_file(path, render_csv(table)); }

std::vector<std::vector<std::string>> read_csv_cells(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line, record;
  bool open_quote = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    record += open_quote ? "\n" + line : line;
    for (const char ch : line)
      if (ch == '"') open_quote = !open_quote;
    if (open_quote) continue;
    rows.push_back(split_csv_line(record));
    record.clear();
  }
  if (open_quote) throw std::invalid_argument("csv: unterminated quote");
  return rows;
}

std::string render_line_chart_svg(const std::vector<Series>& series, const ChartLabels& labels) {
  if (series.empty()) throw std::invalid_argument("line chart: no series");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("line chart: series '" + s.label + "' has unequal x/y lengths");
    if (s.x.empty()) throw std::invalid_argument("line chart: series '" + s.label + "' is empty");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      if (std::isfinite(s.y[i])) {
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  }
  if (!std::isfinite(xmin)) { xmin = 0.0; xmax = 1.0; }
  if (!std::isfinite(ymin)) { ymin = 0.0; ymax = 1.0; }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(labels.title) << "</text>\n";
  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\"" << kTop + ph << "\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph << "\"/>\n"
      << "</g>\n";
  svg << "<g class=\"ticks\" font-size=\"11\">\n";
  for (const double t : nice_ticks(xmin, xmax)) {
    svg << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fmt(sx(t)) << "\" y2=\""
        << kTop + ph + 5 << "\" stroke=\"black\"/>"
        << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << tick_label(t)
        << "</text>\n";
  }
  for (const double t : nice_ticks(ymin, ymax)) {
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << kLeft << "\" y2=\"" << fmt(sy(t))
        << "\" stroke=\"black\"/>"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(sy(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
        << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(labels.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << fmt(kTop + ph / 2) << ")\">" << xml_escape(labels.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    svg << "<g class=\"series\" data-label=\"" << xml_escape(s.label) << "\">\n";
    std::string points;
    auto flush = [&]() {
      if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double x = s.x[i], y = s.y[i];
      if (!std::isfinite(x) || std::isnan(y)) {
        flush();
        continue;
      }
      if (std::isinf(y)) {
        flush();
        const double px = sx(x);
        if (y > 0) {
          svg << "<path class=\"inf-marker\" data-y=\"" << fmt(kTop) << "\" d=\"M " << fmt(px) << ' ' << fmt(kTop) << " L "
              << fmt(px - 4) << ' ' << fmt(kTop + 7) << " L " << fmt(px + 4) << ' ' << fmt(kTop + 7) << " Z\" fill=\"" << color
              << "\"/>\n";
        } else {
          svg << "<path class=\"ninf-marker\" data-y=\"" << fmt(kTop + ph) << "\" d=\"M " << fmt(px) << ' ' << fmt(kTop + ph)
              << " L " << fmt(px - 4) << ' ' << fmt(kTop + ph - 7) << " L " << fmt(px + 4) << ' ' << fmt(kTop + ph - 7)
              << " Z\" fill=\"" << color << "\"/>\n";
        }
        continue;
      }
      if (!points.empty()) points.push_back(' ');
      points += fmt(sx(x)) + "," + fmt(sy(y));
    }
    flush();
    svg << "</g>\n";
  }

  svg << "<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << fmt(ly) << "\" x2=\"" << kLeft + pw + 32 << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << kPalette[k % std::size(kPalette)] << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << fmt(ly + 4) << "\">" << xml_escape(series[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void render_line_chart(const std::vector<Series>& series, const ChartLabels& labels, const std::string& path) {
  write_text_file(path, render_line_chart_svg(series, labels));
}

Table runlog_table(const RunLog& log) {
  Table t{{"iter", "critic_loss", "gen_loss", "quality_w1", "wallclock_ms"}, {}};
  for (const auto& e : log.entries) {
    t.add_row({static_cast<std::int64_t>(e.iter), e.critic_loss, e.gen_loss,
               e.quality_w1 ? Cell(*e.quality_w1) : Cell(std::string()), e.wallclock_ms});
  }
  return t;
}

nlohmann::json training_config_json(const TrainingConfig& c) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["learning_rate"] = c.learning_rate;
  j["generator_learning_rate"] = c.generator_learning_rate ? nlohmann::json(*c.generator_learning_rate) : nlohmann::json();
  j["clip"] = c.clip;
  j["batch_size"] = c.batch_size;
  j["n_critic"] = c.n_critic;
  j["generator_iters"] = c.generator_iters;
  j["optimizer"] = std::string(optimizer_name(c.optimizer));
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["critic_warmup_iters"] = c.critic_warmup_iters;
  j["critic_warmup_steps"] = c.critic_warmup_steps;
  j["eval_batch_size"] = c.eval_batch_size;
  j["seed"] = c.seed;
  return j;
}

void write_runlog(const RunLog& log, const TrainingConfig& config, const std::string& csv_path) {
  write_csv(runlog_table(log), csv_path);
  nlohmann::json side;
  side["schema_version"] = 1;
  side["config"] = training_config_json(config);
  side["seed"] = config.seed;
  side["iterations_logged"] = log.size();
  side["diverged"] = log.diverged;
  side["diverged_reason"] = log.diverged_reason;
  write_text_file(std::filesystem::path(csv_path).replace_extension(".json").string(), side.dump(2) + "\n");
}

Table transport_plan_table(const TransportPlan& plan) {
  Table t{{"i", "j", "mass"}, {}};
  for (Eigen::Index i = 0; i < plan.coupling.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.coupling.cols(); ++j) {
      if (plan.coupling(i, j) > 0.0) t.add_row({static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), plan.coupling(i, j)});
    }
  }
  return t;
}

}  // namespace wdistlab
