#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mts/apps/gwtree.hpp"
#include "mts/apps/sat.hpp"
#include "mts/budget.hpp"
#include "mts/engine.hpp"
#include "mts/metrics.hpp"
#include "mts/reverse_search.hpp"

namespace mts {

enum class Command { run, gw_experiment, efficiency, help };

struct CliOptions {
  Command command = Command::run;
  // topsorts, spantree, gwtree or sat for Command::run.
  std::string app;
  // "-" or absent reads standard input.
  std::optional<std::string> input_path;
  SchedulerConfig config;
  rs::PruneMode prune = rs::PruneMode::off;
  MetricsPaths metrics;
  sat::SolverOptions sat;

  // gwexp
  std::string law = "catalan";
  std::optional<double> sigma2;
  gw::Experiment experiment;

  // efficiency
  double single_seconds = 0.0;
  int cores = 0;
  double multi_seconds = 0.0;
};

// args excludes the program name. Throws UsageError.
CliOptions parse_cli(std::span<const std::string> args);

std::string usage_text();

// Throws UsageError for unknown names.
std::shared_ptr<Application> make_application(std::string_view name, const CliOptions& options = {});

// Runs a parsed command. Returns the process exit code; error messages go
// to err.
int run_cli(const CliOptions& options, std::istream& in, std::ostream& out, std::ostream& err,
            RunControl* control = nullptr);

// parse_cli + run_cli with exit-code mapping of every error class.
int cli_main(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err,
             RunControl* control = nullptr);

}  // namespace mts
