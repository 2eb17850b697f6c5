#include "mts/cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mts/apps/spantree.hpp"
#include "mts/apps/topsorts.hpp"
#include "mts/error.hpp"

namespace mts {

namespace {

template <class T>
T parse_number(std::string_view flag, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError("bad value '" + std::string(text) + "' for " + std::string(flag));
  return value;
}

std::uint64_t parse_limit(std::string_view flag, std::string_view text) {
  if (text == "inf" || text == "unbounded") return kUnbounded;
  return parse_number<std::uint64_t>(flag, text);
}

double parse_double(std::string_view flag, std::string_view text) {
  // from_chars for double is not reliable across standard libraries.
  std::string copy(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(copy, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != copy.size())
    throw UsageError("bad value '" + copy + "' for " + std::string(flag));
  return value;
}

bool is_app(std::string_view name) {
  return name == "topsorts" || name == "spantree" || name == "gwtree" || name == "sat";
}

std::string read_all(std::istream& in) {
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

std::string usage_text() {
  return "usage:\n"
         "  mts <topsorts|spantree|gwtree|sat> [input|-] [options]\n"
         "  mts gwexp [-law L] [-n N] [-b B] [-trials T] [-seed S] [-lo A -hi B] [-sigma2 X] [-threads K]\n"
         "  mts efficiency <single_seconds> <cores> <multi_seconds>\n"
         "options:\n"
         "  -np N             worker count (default 1)\n"
         "  -maxd D|inf       depth limit while the job list is short (default 2)\n"
         "  -maxnodes N|inf   node budget per job (default 5000)\n"
         "  -scale S          node budget multiplier when the job list is long (default 40)\n"
         "  -lmin X -lmax Y   job-list thresholds in units of np+2 (default 1, 3)\n"
         "  -prune off|0|1    prune returned subtrees: off, leaves (0), paths (1)\n"
         "  -countonly        print only the number of outputs\n"
         "  -hist FILE        busy-worker / job-list time series (CSV)\n"
         "  -freq FILE        budget units used per job\n"
         "  -checkpoint FILE  write checkpoints to FILE\n"
         "  -checkpoint-interval SECONDS   (default 60, 0 disables)\n"
         "  -checkpoint-every JOBS         (default 0, disabled)\n"
         "  -restart FILE     resume from a checkpoint; the input supplies the instance\n"
         "  -stopafter JOBS   stop issuing jobs after JOBS completed jobs\n"
         "  -budgetkind nodes|decisions|conflicts\n"
         "  -restarts -vsids  SAT solver options\n"
         "  -restart-base N   conflicts per Luby unit for -restarts (default 100)\n";
}

CliOptions parse_cli(std::span<const std::string> args) {
  CliOptions options;
  if (args.empty()) throw UsageError("missing command");
  const std::string& command = args[0];
  if (command == "-h" || command == "--help" || command == "help") {
    options.command = Command::help;
    return options;
  }

  if (command == "efficiency") {
    options.command = Command::efficiency;
    if (args.size() != 4) throw UsageError("efficiency takes three arguments");
    options.single_seconds = parse_double("single_seconds", args[1]);
    options.cores = parse_number<int>("cores", args[2]);
    options.multi_seconds = parse_double("multi_seconds", args[3]);
    return options;
  }

  if (command == "gwexp") {
    options.command = Command::gw_experiment;
    std::optional<std::uint64_t> lo, hi;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string& flag = args[i];
      if (i + 1 >= args.size()) throw UsageError("missing value for " + flag);
      const std::string& value = args[++i];
      if (flag == "-law") options.law = value;
      else if (flag == "-n") options.experiment.n = parse_number<std::uint64_t>(flag, value);
      else if (flag == "-b") options.experiment.budget = parse_number<std::uint64_t>(flag, value);
      else if (flag == "-trials") options.experiment.trials = parse_number<int>(flag, value);
      else if (flag == "-seed") options.experiment.seed = parse_number<std::uint64_t>(flag, value);
      else if (flag == "-lo") lo = parse_number<std::uint64_t>(flag, value);
      else if (flag == "-hi") hi = parse_number<std::uint64_t>(flag, value);
      else if (flag == "-sigma2") options.sigma2 = parse_double(flag, value);
      else if (flag == "-threads") options.experiment.threads = parse_number<int>(flag, value);
      else throw UsageError("unknown option " + flag);
    }
    if (lo.has_value() != hi.has_value()) throw UsageError("-lo and -hi go together");
    if (lo) {
      if (*lo < 1 || *lo > *hi) throw UsageError("empty size window");
      options.experiment.window = std::pair{*lo, *hi};
    }
    options.experiment.law = gw::OffspringLaw::parse(options.law);
    if (options.sigma2) options.experiment.law.set_prediction_sigma2(*options.sigma2);
    if (options.experiment.n < 1) throw UsageError("-n must be positive");
    return options;
  }

  if (!is_app(command)) throw UsageError("unknown command '" + command + "'");
  options.app = command;
  auto& config = options.config;
  bool kind_given = false;

  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "-countonly") {
      config.count_only = true;
      continue;
    }
    if (arg == "-restarts") {
      options.sat.restarts = true;
      continue;
    }
    if (arg == "-vsids") {
      options.sat.vsids = true;
      continue;
    }
    if (arg == "-" || arg.empty() || arg[0] != '-') {
      if (options.input_path) throw UsageError("more than one input file");
      options.input_path = arg;
      continue;
    }
    if (i + 1 >= args.size()) throw UsageError("missing value for " + arg);
    const std::string& value = args[++i];
    if (arg == "-np") config.num_workers = parse_number<int>(arg, value);
    else if (arg == "-maxd") config.base_max_depth = parse_limit(arg, value);
    else if (arg == "-maxnodes") config.base_max_nodes = parse_limit(arg, value);
    else if (arg == "-scale") config.scale = parse_number<std::uint64_t>(arg, value);
    else if (arg == "-lmin") config.lmin = parse_double(arg, value);
    else if (arg == "-lmax") config.lmax = parse_double(arg, value);
    else if (arg == "-prune") {
      if (value == "off") options.prune = rs::PruneMode::off;
      else if (value == "0") options.prune = rs::PruneMode::leaves;
      else if (value == "1") options.prune = rs::PruneMode::paths;
      else throw UsageError("-prune takes off, 0 or 1");
    } else if (arg == "-hist") options.metrics.histogram = value;
    else if (arg == "-freq") options.metrics.frequency = value;
    else if (arg == "-checkpoint") config.checkpoint_path = value;
    else if (arg == "-checkpoint-interval")
      config.checkpoint_interval = std::chrono::duration<double>(parse_double(arg, value));
    else if (arg == "-checkpoint-every") config.checkpoint_every_jobs = parse_number<std::uint64_t>(arg, value);
    else if (arg == "-restart") config.restart_path = value;
    else if (arg == "-stopafter") config.stop_after_jobs = parse_number<std::uint64_t>(arg, value);
    else if (arg == "-budgetkind") {
      auto kind = parse_budget_kind(value);
      if (!kind) throw UsageError("-budgetkind takes nodes, decisions or conflicts");
      config.budget_kind = *kind;
      kind_given = true;
    } else if (arg == "-restart-base") options.sat.restart_base = parse_number<std::uint64_t>(arg, value);
    else throw UsageError("unknown option " + arg);
  }

  if (options.app == "sat") {
    if (!kind_given) config.budget_kind = BudgetKind::decisions;
    if (config.budget_kind == BudgetKind::nodes) throw UsageError("sat budgets count decisions or conflicts");
    if (options.prune != rs::PruneMode::off) throw UsageError("-prune does not apply to sat");
  } else if (config.budget_kind != BudgetKind::nodes) {
    throw UsageError(options.app + " budgets count nodes");
  }
  if (options.app == "gwtree" && options.prune != rs::PruneMode::off)
    throw UsageError("-prune does not apply to gwtree");
  if (config.checkpoint_interval.count() < 0.0) throw UsageError("checkpoint interval must be nonnegative");
  config.validate();
  return options;
}

std::shared_ptr<Application> make_application(std::string_view name, const CliOptions& options) {
  if (name == "topsorts") return std::make_shared<topsorts::Application>(topsorts::Options{options.prune});
  if (name == "spantree") return std::make_shared<spantree::Application>(spantree::Options{options.prune});
  if (name == "gwtree") return std::make_shared<gw::Application>();
  if (name == "sat") return std::make_shared<sat::Application>(options.sat);
  throw UsageError("unknown application '" + std::string(name) + "'");
}

int run_cli(const CliOptions& options, std::istream& in, std::ostream& out, std::ostream& err,
            RunControl* control) {
  switch (options.command) {
    case Command::help:
      out << usage_text();
      return 0;

    case Command::efficiency: {
      EfficiencyRecord r;
      try {
        r = compute_efficiency(options.single_seconds, options.cores, options.multi_seconds);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      out << std::fixed << std::setprecision(3) << "efficiency " << r.efficiency << " speedup "
          << r.speedup << '\n';
      return 0;
    }

    case Command::gw_experiment: {
      const auto result = gw::measure_joblist_ratio(options.experiment);
      out << gw::format_csv(options.experiment, result);
      const double exact =
          gw::predicted_ratio(options.experiment.law.variance(), options.experiment.budget);
      out << std::setprecision(6) << "# mean_ratio=" << result.mean_ratio
          << " predicted=" << result.predicted << " predicted_with_exact_variance=" << exact << '\n';
      return 0;
    }

    case Command::run:
      break;
  }

  std::string input;
  if (!options.input_path || *options.input_path == "-") {
    input = read_all(in);
  } else {
    std::ifstream file(*options.input_path, std::ios::binary);
    if (!file) throw InputError("cannot open input file " + *options.input_path);
    input = read_all(file);
  }

  auto app = make_application(options.app, options);
  const RunReport report = run(app, input, options.config, out, control);
  out.flush();
  emit_histograms(report.metrics, options.metrics);
  if (report.interrupted) {
    err << "mts: stopped after " << report.jobs_executed << " jobs";
    if (options.config.checkpoint_path) err << "; checkpoint in " << options.config.checkpoint_path->string();
    err << '\n';
  }
  return 0;
}

int cli_main(std::span<const std::string> args, std::istream& in, std::ostream& out, std::ostream& err,
             RunControl* control) {
  try {
    return run_cli(parse_cli(args), in, out, err, control);
  } catch (const UsageError& e) {
    err << "mts: " << e.what() << '\n' << usage_text();
    return 1;
  } catch (const InputError& e) {
    err << "mts: " << e.what() << '\n';
    return 2;
  } catch (const AbortError& e) {
    err << "mts: aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "mts: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace mts
