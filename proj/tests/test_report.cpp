#include "doctest.h"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wdistlab/numfmt.hpp"
#include "wdistlab/report.hpp"

using namespace wdistlab;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("empty table renders its header only") {
  const Table t{{"a", "b", "c"}, {}};
  CHECK(render_csv(t) == "a,b,c\n");
}

TEST_CASE("rows must match the header") {
  Table t{{"a", "b"}, {}};
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  t.add_row({1.0, std::string("x")});
  CHECK_THROWS(t.column("b"));
  CHECK_THROWS(t.column("zzz"));
  CHECK(t.column("a") == std::vector<double>{1.0});
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  Table t{{"i", "x", "label"}, {}};
  const std::vector<std::string> labels{"plain", "has,comma", "has \"quote\"", "", "multi\nline"};
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) {
    double x = nd(gen) * std::pow(10.0, static_cast<double>(static_cast<int>(gen() % 40) - 20));
    if (i == 0) x = kInf;
    if (i == 1) x = -kInf;
    if (i == 2) x = 0.1;
    xs.push_back(x);
    t.add_row({std::int64_t{i}, x, labels[static_cast<std::size_t>(i) % labels.size()]});
  }
  const std::string csv = render_csv(t);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv.find("0.10000000000000001") != std::string::npos);

  std::istringstream in(csv);
  const auto rows = read_csv_cells(in);
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == std::vector<std::string>{"i", "x", "label"});
  for (int i = 0; i < 200; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i) + 1];
    CHECK(r[0] == std::to_string(i));
    CHECK(std::bit_cast<std::uint64_t>(parse_double(r[1])) == std::bit_cast<std::uint64_t>(xs[static_cast<std::size_t>(i)]));
    CHECK(r[2] == labels[static_cast<std::size_t>(i) % labels.size()]);
  }
}

TEST_CASE("a two-point series is exactly one polyline") {
  const std::string svg = render_line_chart_svg({{"s", {0.0, 1.0}, {0.0, 1.0}}}, {"t", "x", "y"});
  CHECK(count(svg, "<polyline") == 1);
  // plot box 420 x 310 at (70, 40); y range padded by 5% each side
  CHECK(svg.find("points=\"70.00,335.91 490.00,54.09\"") != std::string::npos);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("chart breaks lines at infinities and marks them on the edge") {
  const Series s{"kl", {0, 1, 2, 3, 4, 5}, {1, 2, kInf, 3, 4, -kInf}};
  const std::string svg = render_line_chart_svg({s}, {"title & more", "x", "y"});
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "class=\"inf-marker\"") == 1);
  CHECK(count(svg, "class=\"ninf-marker\"") == 1);
  CHECK(svg.find("class=\"inf-marker\" data-y=\"40.00\"") != std::string::npos);
  CHECK(svg.find("class=\"ninf-marker\" data-y=\"350.00\"") != std::string::npos);
  CHECK(svg.find("title &amp; more") != std::string::npos);
  CHECK(count(svg, "nan") == 0);
  CHECK(count(svg, "inf\"") == 0);
}

TEST_CASE("chart rendering is byte-identical across calls and rejects bad input") {
  const std::vector<Series> s{{"a", {0, 1, 2}, {3, 1, 2}}, {"b", {0, 1, 2}, {0.5, 0.5, 0.5}}};
  CHECK(render_line_chart_svg(s, {"t", "x", "y"}) == render_line_chart_svg(s, {"t", "x", "y"}));
  CHECK_THROWS(render_line_chart_svg({}, {}));
  CHECK_THROWS(render_line_chart_svg({{"bad", {0, 1}, {0}}}, {}));
  const std::string flat = render_line_chart_svg({{"c", {1.0}, {2.0}}}, {});
  CHECK(count(flat, "<polyline") == 1);
}

TEST_CASE("run log csv and json sidecar") {
  RunLog log;
  log.append({0, 0.5, -0.25, std::nullopt, 0.0, std::nullopt});
  log.append({1, 0.75, -0.5, 0.125, 0.0, std::nullopt});
  log.diverged = true;
  log.diverged_reason = "non-finite critic objective";
  TrainingConfig cfg;
  cfg.seed = 42;
  cfg.generator_iters = 2;
  const fs::path dir = fs::temp_directory_path() / "wdistlab_test_report";
  fs::remove_all(dir);
  write_runlog(log, cfg, (dir / "run.csv").string());
  CHECK(slurp(dir / "run.csv") ==
        "iter,critic_loss,gen_loss,quality_w1,wallclock_ms\n0,0.5,-0.25,,0\n1,0.75,-0.5,0.125,0\n");
  const auto side = nlohmann::json::parse(slurp(dir / "run.json"));
  CHECK(side["schema_version"] == 1);
  CHECK(side["seed"] == 42);
  CHECK(side["diverged"] == true);
  CHECK(side["iterations_logged"] == 2);
  CHECK(side["config"]["learning_rate"] == 5e-5);
  CHECK(side["config"]["clip"] == 0.01);
  CHECK(side["config"]["batch_size"] == 64);
  CHECK(side["config"]["n_critic"] == 5);
  CHECK(side["config"]["optimizer"] == "rmsprop");
  fs::remove_all(dir);
}

TEST_CASE("transport plan table lists positive entries") {
  TransportPlan plan;
  plan.coupling = Matrix{{0.5, 0.0}, {0.0, 0.5}};
  const Table t = transport_plan_table(plan);
  CHECK(render_csv(t) == "i,j,mass\n0,0,0.5\n1,1,0.5\n");
}

TEST_CASE("writing into an unwritable location fails loudly") {
  CHECK_THROWS(write_text_file("/proc/wdistlab_no_such_dir/x.txt", "x"));
}
