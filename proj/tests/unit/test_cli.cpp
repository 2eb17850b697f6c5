#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mts/cli.hpp"
#include "mts/error.hpp"
#include "mts/metrics.hpp"

using namespace mts;

namespace {

CliOptions parse(std::vector<std::string> args) { return parse_cli(args); }

int main_with(std::vector<std::string> args, const std::string& input, std::string* out_text = nullptr) {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli_main(args, in, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("defaults") {
  const auto o = parse({"topsorts", "in.txt"});
  CHECK(o.app == "topsorts");
  CHECK(o.input_path == "in.txt");
  CHECK(o.config.base_max_depth == 2);
  CHECK(o.config.base_max_nodes == 5000);
  CHECK(o.config.scale == 40);
  CHECK(o.config.lmin == 1.0);
  CHECK(o.config.lmax == 3.0);
  CHECK(o.config.num_workers == 1);
  CHECK(o.prune == rs::PruneMode::off);
}

TEST_CASE("budget flags") {
  const auto o = parse({"spantree", "-scale", "200", "-maxnodes", "10000", "-maxd", "inf", "-np", "8"});
  CHECK(o.config.scale == 200);
  CHECK(o.config.base_max_nodes == 10000);
  CHECK(o.config.base_max_depth == kUnbounded);
  CHECK(o.config.num_workers == 8);
  CHECK_FALSE(o.input_path);
  CHECK(parse({"topsorts", "-prune", "1"}).prune == rs::PruneMode::paths);
  CHECK(parse({"topsorts", "-prune", "0"}).prune == rs::PruneMode::leaves);
  CHECK(parse({"sat"}).config.budget_kind == BudgetKind::decisions);
  CHECK(parse({"sat", "-budgetkind", "conflicts"}).config.budget_kind == BudgetKind::conflicts);
}

TEST_CASE("usage errors") {
  CHECK_THROWS_AS(parse({"topsorts", "-lmin", "3", "-lmax", "1"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "-bogus", "1"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "-np"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "-np", "two"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "a", "b"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "-prune", "2"}), UsageError);
  CHECK_THROWS_AS(parse({"topsorts", "-budgetkind", "decisions"}), UsageError);
  CHECK_THROWS_AS(parse({"sat", "-budgetkind", "nodes"}), UsageError);
  CHECK_THROWS_AS(parse({"knapsack"}), UsageError);
  CHECK_THROWS_AS(parse({}), UsageError);
}

TEST_CASE("exit codes") {
  std::string out;
  CHECK(main_with({"topsorts", "-countonly"}, "3 0\n", &out) == 0);
  CHECK(out == "count 6\n");
  CHECK(main_with({"topsorts", "-np", "0"}, "3 0\n") == 1);
  CHECK(main_with({"topsorts"}, "3 1\n1 9\n") == 2);
  CHECK(main_with({"topsorts", "/nonexistent/input"}, "") == 2);
  CHECK(main_with({"sat"}, "p cnf 1 2\n1 0\n-1 0\n", &out) == 0);
  CHECK(out == "s UNSATISFIABLE\n");
}

TEST_CASE("efficiency") {
  auto r = compute_efficiency(100, 4, 25);
  CHECK(r.efficiency == doctest::Approx(1.0));
  CHECK(r.speedup == doctest::Approx(4.0));
  CHECK(compute_efficiency(12723, 192, 125).efficiency == doctest::Approx(0.530).epsilon(0.002));
  CHECK(compute_efficiency(8957, 12, 859).efficiency == doctest::Approx(0.869).epsilon(0.002));
  CHECK_THROWS_AS(compute_efficiency(0, 4, 25), std::invalid_argument);
  CHECK_THROWS_AS(compute_efficiency(10, -1, 25), std::invalid_argument);
  std::string out;
  CHECK(main_with({"efficiency", "12723", "192", "125"}, "", &out) == 0);
  CHECK(out.rfind("efficiency 0.530", 0) == 0);
  CHECK(main_with({"efficiency", "1", "0", "1"}, "") == 1);
}

TEST_CASE("metrics files") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto hist = dir / "mts_unit_hist.csv";
  const auto freq = dir / "mts_unit_freq.txt";
  std::string out;
  CHECK(main_with({"topsorts", "-countonly", "-maxd", "inf", "-maxnodes", "1000", "-hist", hist.string(),
                   "-freq", freq.string()},
                  "4 0\n", &out) == 0);
  std::ifstream f(freq);
  std::vector<std::string> lines;
  for (std::string line; std::getline(f, line);) lines.push_back(line);
  CHECK(lines == std::vector<std::string>{"23"});  // one job
  std::ifstream h(hist);
  std::string header;
  std::getline(h, header);
  CHECK(header == "elapsed_seconds,busy_workers,joblist_len");
  std::filesystem::remove(hist);
  std::filesystem::remove(freq);

  RunMetrics metrics;
  metrics.frequencies = {1};
  CHECK_FALSE(emit_histograms(metrics, {std::nullopt, std::filesystem::path("/nonexistent/dir/f")}));
}

TEST_CASE("static budget hits the budget exactly on some job") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto freq = dir / "mts_unit_freq_b.txt";
  CHECK(main_with({"topsorts", "-countonly", "-maxd", "inf", "-maxnodes", "7", "-scale", "1", "-freq",
                   freq.string()},
                  "5 0\n") == 0);
  std::ifstream f(freq);
  bool at_budget = false;
  for (std::string line; std::getline(f, line);) at_budget |= std::stoull(line) >= 7;
  CHECK(at_budget);
  std::filesystem::remove(freq);
}
