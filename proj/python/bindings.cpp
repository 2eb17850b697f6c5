#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mts/apps/gwtree.hpp"
#include "mts/apps/sat.hpp"
#include "mts/cli.hpp"
#include "mts/engine.hpp"
#include "mts/error.hpp"
#include "mts/metrics.hpp"

namespace py = pybind11;

namespace {

std::uint64_t limit_from(const std::optional<std::uint64_t>& value) { return value ? *value : mts::kUnbounded; }

py::object limit_to(std::uint64_t value) {
  if (value == mts::kUnbounded) return py::none();
  return py::int_(value);
}

mts::CliOptions options_for(const std::string& app, int workers, std::optional<std::uint64_t> max_depth,
                            std::optional<std::uint64_t> max_nodes, std::uint64_t scale, const std::string& prune,
                            bool count_only) {
  std::vector<std::string> args{app,
                                "-np", std::to_string(workers),
                                "-maxd", max_depth ? std::to_string(*max_depth) : "inf",
                                "-maxnodes", max_nodes ? std::to_string(*max_nodes) : "inf",
                                "-scale", std::to_string(scale),
                                "-prune", prune};
  if (count_only) args.push_back("-countonly");
  return mts::parse_cli(args);
}

py::dict enumerate(const std::string& app, const std::string& input, int workers,
                   std::optional<std::uint64_t> max_depth, std::optional<std::uint64_t> max_nodes,
                   std::uint64_t scale, const std::string& prune, bool count_only) {
  const auto options = options_for(app, workers, max_depth, max_nodes, scale, prune, count_only);
  std::ostringstream out;
  mts::RunReport report;
  {
    py::gil_scoped_release release;
    report = mts::run(mts::make_application(app, options), input, options.config, out);
  }
  std::vector<std::string> lines;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) lines.push_back(line);

  py::dict result;
  result["count"] = report.total_output_count;
  result["outputs"] = count_only ? std::vector<std::string>{} : lines;
  result["jobs"] = report.jobs_executed;
  result["frequencies"] = report.metrics.frequencies;
  result["wall_time"] = report.wall_time;
  return result;
}

py::tuple solve_sat(const std::string& dimacs, int workers, const std::string& budget_kind,
                    std::optional<std::uint64_t> limit, bool restarts, bool vsids) {
  std::vector<std::string> args{"sat", "-np", std::to_string(workers), "-budgetkind", budget_kind,
                                "-maxnodes", limit ? std::to_string(*limit) : "inf", "-scale", "1"};
  if (restarts) args.push_back("-restarts");
  if (vsids) args.push_back("-vsids");
  const auto options = mts::parse_cli(args);
  std::ostringstream out;
  {
    py::gil_scoped_release release;
    mts::run(mts::make_application("sat", options), dimacs, options.config, out);
  }
  std::istringstream in(out.str());
  std::string status_line, values;
  std::getline(in, status_line);
  if (status_line == "s SATISFIABLE") {
    std::getline(in, values);
    std::istringstream lits(values.substr(1));
    std::vector<int> model;
    for (int lit; lits >> lit && lit != 0;) model.push_back(lit);
    return py::make_tuple(true, model);
  }
  return py::make_tuple(false, py::none());
}

py::dict joblist_ratio(const std::string& law, std::uint64_t n, std::uint64_t budget, int trials,
                       std::uint64_t seed, std::optional<std::uint64_t> lo, std::optional<std::uint64_t> hi,
                       std::optional<double> sigma2) {
  mts::gw::Experiment e;
  e.law = mts::gw::OffspringLaw::parse(law);
  if (sigma2) e.law.set_prediction_sigma2(*sigma2);
  e.n = n;
  e.budget = budget;
  e.trials = trials;
  e.seed = seed;
  if (lo.has_value() != hi.has_value()) throw mts::UsageError("lo and hi go together");
  if (lo) e.window = std::pair{*lo, *hi};
  mts::gw::ExperimentResult r;
  {
    py::gil_scoped_release release;
    r = mts::gw::measure_joblist_ratio(e);
  }
  std::vector<std::uint64_t> sizes;
  std::vector<double> ratios;
  for (const auto& t : r.trials) {
    sizes.push_back(t.size);
    ratios.push_back(t.ratio);
  }
  py::dict out;
  out["mean_ratio"] = r.mean_ratio;
  out["predicted"] = r.predicted;
  out["sizes"] = sizes;
  out["ratios"] = ratios;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parallel budgeted tree search";

  static py::exception<mts::UsageError> usage_error(m, "UsageError", PyExc_ValueError);
  static py::exception<mts::InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<mts::AbortError> abort_error(m, "AbortError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mts::UsageError& e) {
      usage_error(e.what());
    } catch (const mts::InputError& e) {
      input_error(e.what());
    } catch (const mts::AbortError& e) {
      abort_error(e.what());
    }
  });

  m.def(
      "select_budget",
      [](std::size_t joblist_len, int num_workers, std::optional<std::uint64_t> max_depth,
         std::optional<std::uint64_t> max_nodes, std::uint64_t scale, double lmin, double lmax) {
        mts::SchedulerConfig c;
        c.num_workers = num_workers;
        c.base_max_depth = limit_from(max_depth);
        c.base_max_nodes = limit_from(max_nodes);
        c.scale = scale;
        c.lmin = lmin;
        c.lmax = lmax;
        c.validate();
        const auto b = mts::select_budget(joblist_len, c);
        return py::make_tuple(limit_to(b.max_depth), limit_to(b.max_nodes));
      },
      py::arg("joblist_len"), py::arg("num_workers") = 1, py::arg("max_depth") = 2, py::arg("max_nodes") = 5000,
      py::arg("scale") = 40, py::arg("lmin") = 1.0, py::arg("lmax") = 3.0,
      "(max_depth, max_nodes) for a job list of the given length; None means unbounded.");

  m.def(
      "compute_efficiency",
      [](double single, int cores, double multi) {
        try {
          const auto r = mts::compute_efficiency(single, cores, multi);
          return py::make_tuple(r.efficiency, r.speedup);
        } catch (const std::invalid_argument& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("single_seconds"), py::arg("cores"), py::arg("multi_seconds"));

  m.def("enumerate", &enumerate, py::arg("app"), py::arg("input"), py::arg("workers") = 1,
        py::arg("max_depth") = 2, py::arg("max_nodes") = 5000, py::arg("scale") = 40, py::arg("prune") = "off",
        py::arg("count_only") = false,
        "Run topsorts, spantree or gwtree on the given input text.");

  m.def("solve_sat", &solve_sat, py::arg("dimacs"), py::arg("workers") = 1, py::arg("budget_kind") = "decisions",
        py::arg("limit") = 5000, py::arg("restarts") = false, py::arg("vsids") = false,
        "Returns (True, model) or (False, None).");

  m.def("offspring_variance",
        [](const std::string& law) { return mts::gw::offspring_variance(mts::gw::OffspringLaw::parse(law)); });
  m.def("predicted_ratio", &mts::gw::predicted_ratio, py::arg("sigma2"), py::arg("budget"));
  m.def("joblist_ratio", &joblist_ratio, py::arg("law") = "catalan", py::arg("n") = 100000,
        py::arg("budget") = 5000, py::arg("trials") = 20, py::arg("seed") = 1, py::arg("lo") = py::none(),
        py::arg("hi") = py::none(), py::arg("sigma2") = py::none());
}
