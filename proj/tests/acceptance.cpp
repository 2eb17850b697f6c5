// Acceptance checks. Usage: mts_acceptance [--criterion ID] [--mts PATH]
// Prints one PASS/FAIL line per criterion; exit status 1 if any failed.
#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "mts/apps/gwtree.hpp"
#include "mts/apps/sat.hpp"
#include "mts/apps/spantree.hpp"
#include "mts/apps/topsorts.hpp"
#include "mts/metrics.hpp"
#include "oracles.hpp"
#include "run_helpers.hpp"

using namespace mts;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string mts_binary;

struct Instance {
  std::string app;
  std::string name;
  std::string text;
};

std::vector<Instance> poset_instances() {
  std::vector<Instance> out;
  for (int n = 1; n <= 7; ++n) out.push_back({"topsorts", "antichain" + std::to_string(n), oracle::poset_text(n, {})});
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b)
      out.push_back({"topsorts", "K(" + std::to_string(a) + "," + std::to_string(b) + ")",
                     oracle::poset_text(a + b, oracle::complete_bipartite_poset(a, b))});
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20; ++i)
    out.push_back({"topsorts", "random poset " + std::to_string(i), oracle::poset_text(8, oracle::random_poset(8, 0.25, rng))});
  return out;
}

std::vector<std::pair<Instance, oracle::Pairs>> graph_instances() {
  std::vector<std::pair<Instance, oracle::Pairs>> out;
  auto add = [&](const std::string& name, int n, oracle::Pairs edges) {
    out.push_back({{"spantree", name, oracle::graph_text(n, edges)}, edges});
  };
  for (int n = 3; n <= 10; ++n) add("C" + std::to_string(n), n, oracle::cycle_graph(n));
  add("K4", 4, oracle::complete_graph(4));
  add("K(3,3)", 6, oracle::complete_bipartite_graph(3, 3));
  add("K5", 5, oracle::complete_graph(5));
  add("Petersen", 10, oracle::petersen_graph());
  std::mt19937_64 rng(4048);
  for (int i = 0; i < 20; ++i) add("random graph " + std::to_string(i), 7, oracle::random_connected_graph(7, 0.45, rng));
  return out;
}

std::uint64_t engine_count(const Instance& inst, int workers = 4) {
  auto config = testing::static_config(workers, kUnbounded, 200);
  config.count_only = true;
  return testing::run_named(inst.app, inst.text, config).report.total_output_count;
}

// ---- 1 ----------------------------------------------------------------------
Verdict topsorts_oracles() {
  Verdict v;
  const auto start = Clock::now();
  for (int n = 1; n <= 7; ++n)
    v.require(engine_count({"topsorts", "", oracle::poset_text(n, {})}) == oracle::factorial(n),
              "antichain " + std::to_string(n));
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b)
      v.require(engine_count({"topsorts", "", oracle::poset_text(a + b, oracle::complete_bipartite_poset(a, b))}) ==
                    oracle::factorial(a) * oracle::factorial(b),
                "K(" + std::to_string(a) + "," + std::to_string(b) + ")");
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20; ++i) {
    const auto rel = oracle::random_poset(8, 0.25, rng);
    const auto outcome = testing::run_named("topsorts", oracle::poset_text(8, rel), testing::static_config(4, 2, 50));
    std::set<std::string> expected;
    for (const auto& ext : oracle::linear_extensions(8, rel)) {
      std::string s;
      for (int x : ext) s += (s.empty() ? "" : " ") + std::to_string(x);
      expected.insert(s);
    }
    v.require(std::set<std::string>(outcome.lines.begin(), outcome.lines.end()) == expected &&
                  outcome.lines.size() == expected.size(),
              "random poset " + std::to_string(i));
  }
  const double t = seconds_since(start);
  v.require(t < 60.0, "runtime");
  v.detail << "time " << t << "s";
  return v;
}

// ---- 2 ----------------------------------------------------------------------
Verdict spantree_oracles() {
  Verdict v;
  const auto start = Clock::now();
  const std::map<std::string, long long> known{{"K4", 16}, {"K(3,3)", 81}, {"K5", 125}, {"Petersen", 2000}};
  for (const auto& [inst, edges] : graph_instances()) {
    const int n = std::stoi(inst.text);
    long long expected = oracle::count_spanning_trees(n, edges);
    if (inst.name[0] == 'C') v.require(expected == n, inst.name + " determinant");
    if (auto it = known.find(inst.name); it != known.end()) v.require(expected == it->second, inst.name + " determinant");
    v.require(engine_count(inst) == static_cast<std::uint64_t>(expected), inst.name);
  }
  const double t = seconds_since(start);
  v.require(t < 60.0, "runtime");
  v.detail << "time " << t << "s";
  return v;
}

// ---- 3 ----------------------------------------------------------------------
Verdict determinism() {
  Verdict v;
  const auto text = oracle::poset_text(8, oracle::complete_bipartite_poset(4, 4));
  std::vector<std::string> reference_lines;
  std::vector<std::uint64_t> reference_freq;
  for (int workers : {1, 2, 4, 8}) {
    auto outcome = testing::run_named("topsorts", text, testing::static_config(workers, kUnbounded, 50));
    std::sort(outcome.lines.begin(), outcome.lines.end());
    auto freq = outcome.report.metrics.frequencies;
    std::sort(freq.begin(), freq.end());
    if (workers == 1) {
      reference_lines = outcome.lines;
      reference_freq = freq;
      v.require(reference_lines.size() == 576, "K(4,4) count");
      continue;
    }
    v.require(outcome.lines == reference_lines, "output with " + std::to_string(workers) + " workers");
    v.require(freq == reference_freq, "frequencies with " + std::to_string(workers) + " workers");
  }
  v.detail << reference_lines.size() << " outputs, " << reference_freq.size() << " jobs";
  return v;
}

// ---- 4 ----------------------------------------------------------------------
Verdict partition() {
  Verdict v;
  std::vector<Instance> instances = poset_instances();
  for (auto& g : graph_instances()) instances.push_back(g.first);
  instances.push_back({"gwtree", "catalan tree", "catalan 3000 17"});
  instances.push_back({"gwtree", "geometric tree", "geometric 3000 5"});

  std::size_t runs = 0;
  for (const auto& inst : instances) {
    const auto unbudgeted = testing::run_named(inst.app, inst.text, testing::static_config(1, kUnbounded, kUnbounded));
    const std::uint64_t nodes = testing::sum(unbudgeted.report.metrics.frequencies);
    const std::size_t outputs = unbudgeted.lines.size();
    for (auto [d, b] : {std::pair<std::uint64_t, std::uint64_t>{2, 10}, {kUnbounded, 50}, {kUnbounded, 5000}}) {
      const auto outcome = testing::run_named(inst.app, inst.text, testing::static_config(4, d, b));
      ++runs;
      v.require(testing::sum(outcome.report.metrics.frequencies) == nodes, inst.name + " frequency sum");
      v.require(outcome.lines.size() == outputs, inst.name + " output count");
      v.require(!testing::has_duplicates(outcome.lines), inst.name + " duplicates");
    }
  }
  v.detail << instances.size() << " instances, " << runs << " budgeted runs";
  return v;
}

// ---- 5 ----------------------------------------------------------------------
Verdict budget_policy() {
  Verdict v;
  SchedulerConfig c;
  c.num_workers = 12;
  v.require(select_budget(5, c) == Budget{2, 5000}, "len 5");
  v.require(select_budget(20, c) == Budget{kUnbounded, 5000}, "len 20");
  v.require(select_budget(50, c) == Budget{kUnbounded, 200000}, "len 50");
  v.detail << "(2,5000) (inf,5000) (inf,200000)";
  return v;
}

// ---- 6 ----------------------------------------------------------------------
gw::Experiment catalan_experiment(std::uint64_t b) {
  gw::Experiment e;
  e.law = gw::OffspringLaw::catalan();
  e.n = 1'000'000;
  e.window = std::pair<std::uint64_t, std::uint64_t>{1'000'000, 2'000'000};
  e.budget = b;
  e.trials = 20;
  e.seed = 20240601;
  return e;
}

Verdict joblist_level() {
  Verdict v;
  const auto start = Clock::now();
  const auto r = gw::measure_joblist_ratio(catalan_experiment(5000));
  const double target = std::sqrt(3.0 * std::numbers::pi / (16.0 * 5000.0));
  const double exact = gw::predicted_ratio(gw::OffspringLaw::catalan().variance(), 5000);
  std::uint64_t smallest = kUnbounded;
  for (const auto& t : r.trials) smallest = std::min(smallest, t.size);
  v.require(r.trials.size() >= 20 && smallest >= 1'000'000, "tree sizes");
  v.require(std::abs(r.mean_ratio - target) <= 0.15 * target, "mean L/n within 15% of the stated constant");
  v.detail << std::setprecision(5) << "mean L/n " << r.mean_ratio << " vs " << target << " (ratio "
           << r.mean_ratio / target << "); with Var(xi)=1/2 the formula gives " << exact << "; time "
           << seconds_since(start) << "s";
  return v;
}

Verdict joblist_scaling() {
  Verdict v;
  const auto start = Clock::now();
  const auto r1 = gw::measure_joblist_ratio(catalan_experiment(5000));
  const auto r2 = gw::measure_joblist_ratio(catalan_experiment(10000));
  const double factor = r2.mean_ratio / r1.mean_ratio;
  v.require(factor >= 0.65 && factor <= 0.77, "b -> 2b factor");
  const double t = seconds_since(start);
  v.require(t < 600.0, "runtime");
  v.detail << std::setprecision(5) << "L/n " << r1.mean_ratio << " -> " << r2.mean_ratio << ", factor " << factor
           << "; time " << t << "s";
  return v;
}

// ---- 7 ----------------------------------------------------------------------

// Records the shared data handed to finish().
class SharedCapture final : public Application {
 public:
  explicit SharedCapture(std::shared_ptr<Application> inner) : inner_(std::move(inner)) {}
  ApplicationDescriptor descriptor() const override { return inner_->descriptor(); }
  JobNode init(std::string_view input) override { return inner_->init(input); }
  SearchResult search(const JobNode& n, const Budget& b, const SearchContext& c) const override {
    return inner_->search(n, b, c);
  }
  void validate_node(std::string_view p) const override { inner_->validate_node(p); }
  std::vector<std::string> finish(std::span<const std::string> shared, const RunSummary& s) const override {
    shared_.assign(shared.begin(), shared.end());
    return inner_->finish(shared, s);
  }
  mutable std::vector<std::string> shared_;

 private:
  std::shared_ptr<Application> inner_;
};

Verdict sat_agreement() {
  Verdict v;
  const auto start = Clock::now();
  struct Cnf {
    std::string name;
    int n;
    oracle::Clauses clauses;
  };
  std::vector<Cnf> formulas;
  std::mt19937_64 rng(777);
  for (int i = 0; i < 200; ++i) {
    const int n = std::uniform_int_distribution<int>(5, 25)(rng);
    const double ratio = std::uniform_real_distribution<double>(3.0, 5.0)(rng);
    const int m = static_cast<int>(std::lround(ratio * n));
    formulas.push_back({"random " + std::to_string(i), n, oracle::random_3cnf(n, m, rng)});
  }
  formulas.push_back({"PHP(3,2)", 6, oracle::pigeonhole(3, 2)});
  formulas.push_back({"PHP(4,3)", 12, oracle::pigeonhole(4, 3)});

  std::size_t runs = 0, sat_count = 0, units_checked = 0;
  for (const auto& f : formulas) {
    const bool expected = oracle::brute_force_sat(f.n, f.clauses).has_value();
    sat_count += expected;
    const auto text = oracle::dimacs_text(f.n, f.clauses);
    const auto formula = sat::parse_dimacs(text);
    std::set<int> implied, refuted;
    for (int workers : {1, 2, 4, 8})
      for (auto kind : {BudgetKind::decisions, BudgetKind::conflicts})
        for (std::uint64_t limit : {std::uint64_t{1}, std::uint64_t{10}, kUnbounded}) {
          auto app = std::make_shared<SharedCapture>(std::make_shared<sat::Application>());
          const auto outcome = testing::run_app(app, text, testing::static_config(workers, kUnbounded, limit, kind));
          ++runs;
          const std::string where = f.name + " np=" + std::to_string(workers) + " " + std::string(to_string(kind)) +
                                    " limit=" + (limit == kUnbounded ? "inf" : std::to_string(limit));
          if (outcome.lines.empty()) {
            v.require(false, where + " no verdict");
            continue;
          }
          v.require(outcome.lines[0] == (expected ? "s SATISFIABLE" : "s UNSATISFIABLE"), where + " verdict");
          if (expected && outcome.lines.size() >= 2) {
            std::istringstream in(outcome.lines[1]);
            std::string tag;
            in >> tag;
            std::vector<int> model(f.n + 1, 0);
            for (int lit; in >> lit && lit != 0;) model[std::abs(lit)] = lit;
            v.require(tag == "v" && sat::satisfies(formula, model), where + " model");
          } else if (expected) {
            v.require(false, where + " missing model");
          }
          for (const auto& token : app->shared_) {
            const auto unit = sat::decode_unit(token);
            if (!unit) {
              v.require(false, where + " malformed unit");
              continue;
            }
            if (implied.count(*unit)) continue;
            auto with = f.clauses;
            with.push_back({-*unit});
            const bool ok = !oracle::brute_force_sat(f.n, with).has_value();
            ++units_checked;
            v.require(ok, where + " shared unit " + token + " not implied");
            if (ok) implied.insert(*unit);
          }
        }
  }
  const double t = seconds_since(start);
  v.require(t < 300.0, "runtime");
  v.detail << formulas.size() << " formulas (" << sat_count << " satisfiable), " << runs << " runs, "
           << units_checked << " distinct shared units checked; time " << t << "s";
  return v;
}

// ---- 8 ----------------------------------------------------------------------
std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict checkpoint_restart() {
  Verdict v;
  const auto text = oracle::poset_text(8, oracle::complete_bipartite_poset(4, 4));
  const auto dir = std::filesystem::temp_directory_path() / ("mts_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto cp = dir / "run.cp";

  // Interrupted in process at several points.
  for (std::uint64_t stop : {1, 2, 5, 13, 40}) {
    std::filesystem::remove(cp);
    auto config = testing::static_config(3, kUnbounded, 10);
    config.count_only = true;
    config.checkpoint_path = cp;
    config.checkpoint_every_jobs = 1;
    config.stop_after_jobs = stop;
    const auto first = testing::run_named("topsorts", text, config);
    v.require(first.report.interrupted && std::filesystem::exists(cp), "interrupted run " + std::to_string(stop));
    config.stop_after_jobs = 0;
    config.checkpoint_path.reset();
    config.restart_path = cp;
    const auto second = testing::run_named("topsorts", text, config);
    v.require(second.lines == std::vector<std::string>{"count 576"}, "restart after " + std::to_string(stop) + " jobs");
  }

  // A real process killed with SIGKILL once a checkpoint exists.
  if (mts_binary.empty()) {
    v.require(false, "mts binary path not given");
    return v;
  }
  std::filesystem::remove(cp);
  const auto input = dir / "k44.txt";
  std::ofstream(input) << text;

  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) {
    v.require(false, "pipe");
    return v;
  }
  // Small pipe: the child blocks on output until it is killed.
  ::fcntl(pipe_fds[1], F_SETPIPE_SZ, 4096);
  const pid_t child = ::fork();
  if (child == 0) {
    ::dup2(pipe_fds[1], 1);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    const std::string in = input.string(), cps = cp.string();
    ::execl(mts_binary.c_str(), "mts", "topsorts", in.c_str(), "-np", "2", "-maxd", "inf", "-maxnodes", "3",
            "-scale", "1", "-checkpoint", cps.c_str(), "-checkpoint-every", "1", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(pipe_fds[1]);
  const auto deadline = Clock::now() + std::chrono::seconds(20);
  while (!std::filesystem::exists(cp) && Clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  const bool had_checkpoint = std::filesystem::exists(cp);
  ::kill(child, SIGKILL);
  int status = 0;
  ::waitpid(child, &status, 0);
  ::close(pipe_fds[0]);
  v.require(had_checkpoint, "no checkpoint before kill");
  v.require(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "child was not killed mid-run");

  const auto saved = read_file(cp);
  const auto out_path = dir / "restart.out";
  const std::string cmd = "'" + mts_binary + "' topsorts '" + input.string() + "' -np 4 -countonly -restart '" +
                          cp.string() + "' > '" + out_path.string() + "'";
  const int rc = std::system(cmd.c_str());
  const auto restarted = read_file(out_path);
  v.require(rc == 0 && restarted == "count 576\n", "restart after SIGKILL printed '" + restarted + "'");
  std::size_t pending = 0;
  for (std::size_t pos = saved.find("\nN "); pos != std::string::npos; pos = saved.find("\nN ", pos + 1)) ++pending;
  v.detail << "5 interrupted runs; killed process left " << pending << " pending jobs in its checkpoint";
  std::filesystem::remove_all(dir);
  return v;
}

// ---- 9 ----------------------------------------------------------------------
Verdict efficiency() {
  Verdict v;
  const auto a = compute_efficiency(12723, 192, 125);
  const auto b = compute_efficiency(8957, 12, 859);
  v.require(std::abs(a.efficiency - 0.530) <= 0.001, "12723/192/125");
  v.require(std::abs(b.efficiency - 0.869) <= 0.001, "8957/12/859");
  v.detail << std::setprecision(4) << a.efficiency << ", " << b.efficiency;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = argv[++i];
    else if (arg == "--mts" && i + 1 < argc) mts_binary = argv[++i];
    else {
      std::cerr << "usage: mts_acceptance [--criterion ID] [--mts PATH]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1", topsorts_oracles},   {"2", spantree_oracles}, {"3", determinism},
      {"4", partition},          {"5", budget_policy},    {"6a", joblist_level},
      {"6b", joblist_scaling},   {"7", sat_agreement},    {"8", checkpoint_restart},
      {"9", efficiency}};

  bool all = true;
  bool ran = false;
  for (const auto& [id, check] : criteria) {
    if (!only.empty() && only != id) continue;
    ran = true;
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception& e) {
      verdict.pass = false;
      verdict.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << id << ": " << (verdict.pass ? "PASS" : "FAIL") << " - " << verdict.detail.str()
              << std::endl;
    all = all && verdict.pass;
  }
  if (!ran) {
    std::cerr << "unknown criterion " << only << '\n';
    return 2;
  }
  return all ? 0 : 1;
}
