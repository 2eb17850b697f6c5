#include "mts/apps/gwtree.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <deque>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "../text_input.hpp"
#include "mts/codec.hpp"
#include "mts/error.hpp"
#include "mts/reverse_search.hpp"
#include "mts/reverse_search_job.hpp"

namespace mts::gw {

OffspringLaw::OffspringLaw(LawKind kind, std::string name, int k)
    : kind_(kind), name_(std::move(name)), k_(k) {
  prediction_sigma2_ = kind == LawKind::catalan ? 1.5 : variance();
}

OffspringLaw OffspringLaw::parse(std::string_view name) {
  auto parameterised = [&](std::string_view prefix) -> std::optional<int> {
    if (!name.starts_with(prefix) || !name.ends_with(")")) return std::nullopt;
    const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size())
      throw UsageError("bad parameter in offspring law '" + std::string(name) + "'");
    return k;
  };

  if (name == "catalan") return {LawKind::catalan, "catalan", 0};
  if (name == "fullbinary") return {LawKind::fullbinary, "fullbinary", 0};
  if (name == "geometric") return {LawKind::geometric, "geometric", 0};
  if (name == "poisson") return {LawKind::poisson, "poisson", 0};
  if (auto k = parameterised("binomial(")) {
    // Mean k * (1/k) = 1; k = 1 would give P(xi = 1) = 1.
    if (*k < 2) throw UsageError("binomial(k) needs k >= 2");
    return {LawKind::binomial, std::string(name), *k};
  }
  if (auto k = parameterised("uniform(")) {
    // Uniform on {0..k} has mean k/2.
    if (*k != 2) throw UsageError("uniform(k) is critical only for k = 2");
    return {LawKind::uniform, std::string(name), *k};
  }
  throw UsageError("unknown offspring law '" + std::string(name) + "'");
}

double OffspringLaw::variance() const {
  switch (kind_) {
    case LawKind::catalan: return 0.5;     // {0:1/4, 1:1/2, 2:1/4}
    case LawKind::fullbinary: return 1.0;  // {0:1/2, 2:1/2}
    case LawKind::geometric: return 2.0;   // P(i) = 2^-(i+1)
    case LawKind::poisson: return 1.0;
    case LawKind::binomial: return 1.0 - 1.0 / k_;
    case LawKind::uniform: return (static_cast<double>(k_) * (k_ + 2)) / 12.0;
  }
  return 0.0;
}

std::uint32_t OffspringLaw::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case LawKind::catalan: {
      const auto bits = rng() >> 62;  // two fair bits
      return bits == 0 ? 0 : (bits == 3 ? 2 : 1);
    }
    case LawKind::fullbinary: return (rng() >> 63) ? 2 : 0;
    case LawKind::geometric: return std::geometric_distribution<std::uint32_t>(0.5)(rng);
    case LawKind::poisson: return std::poisson_distribution<std::uint32_t>(1.0)(rng);
    case LawKind::binomial: return std::binomial_distribution<std::uint32_t>(k_, 1.0 / k_)(rng);
    case LawKind::uniform: return std::uniform_int_distribution<std::uint32_t>(0, k_)(rng);
  }
  return 0;
}

double offspring_variance(const OffspringLaw& law) { return law.variance(); }

double predicted_ratio(double sigma2, std::uint64_t budget) {
  return std::sqrt(std::numbers::pi * sigma2 / (8.0 * static_cast<double>(budget)));
}

Tree::Tree(std::vector<std::uint32_t> offspring) : offspring_(std::move(offspring)) {
  const std::size_t n = offspring_.size();
  if (n == 0) throw std::invalid_argument("empty offspring sequence");
  first_child_.resize(n);
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    first_child_[v] = static_cast<std::uint32_t>(total);
    total += offspring_[v];
    max_degree_ = std::max(max_degree_, offspring_[v]);
  }
  if (total != n - 1) throw std::invalid_argument("offspring sequence does not describe a tree");

  children_.resize(n - 1);
  parent_.assign(n, 0);
  sibling_index_.assign(n, 0);
  // (vertex, children still to attach)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> open{{0, offspring_[0]}};
  for (std::uint32_t i = 1; i < n; ++i) {
    while (!open.empty() && open.back().second == 0) open.pop_back();
    if (open.empty()) throw std::invalid_argument("offspring sequence ends the tree early");
    auto& [p, remaining] = open.back();
    const std::uint32_t k = offspring_[p] - remaining;
    children_[first_child_[p] + k] = i;
    parent_[i] = p;
    sibling_index_[i] = k;
    --remaining;
    open.emplace_back(i, offspring_[i]);
  }
}

Tree sample_tree(const OffspringLaw& law, std::uint64_t lo, std::uint64_t hi, std::mt19937_64& rng,
                 SampleLimits limits) {
  if (lo < 1 || lo > hi) throw std::invalid_argument("empty size window");
  std::vector<std::uint32_t> offspring;
  offspring.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(hi, 1u << 26)));
  for (std::uint64_t attempt = 0; attempt < limits.max_attempts; ++attempt) {
    offspring.clear();
    std::int64_t pending = 1;
    while (pending > 0 && offspring.size() < hi) {
      const std::uint32_t k = law.sample(rng);
      offspring.push_back(k);
      pending += static_cast<std::int64_t>(k) - 1;
    }
    if (pending == 0 && offspring.size() >= lo) return Tree(offspring);
  }
  std::ostringstream msg;
  msg << "no " << law.name() << " tree with size in [" << lo << ", " << hi << "] after "
      << limits.max_attempts << " attempts; widen the window";
  throw std::runtime_error(msg.str());
}

std::pair<std::uint64_t, std::uint64_t> Experiment::size_window() const {
  if (window) return *window;
  return {std::max<std::uint64_t>(1, n / 2), std::max<std::uint64_t>(1, n + n / 2)};
}

Trial run_budgeted(const Tree& tree, std::uint64_t budget) {
  const Oracle oracle(tree);
  Trial trial;
  trial.size = tree.size();
  std::deque<std::uint32_t> jobs{0};
  while (!jobs.empty()) {
    const std::uint32_t start = jobs.front();
    jobs.pop_front();
    auto result = rs::budgeted_search(oracle, start, kUnbounded, budget,
                                      [](std::uint32_t, bool, std::uint64_t) {});
    ++trial.jobs;
    trial.visited += result.count;
    trial.returned += result.unexplored.size();
    jobs.insert(jobs.end(), result.unexplored.begin(), result.unexplored.end());
  }
  trial.ratio = static_cast<double>(trial.returned) / static_cast<double>(trial.size);
  return trial;
}

ExperimentResult measure_joblist_ratio(const Experiment& experiment) {
  if (experiment.trials < 1) throw UsageError("need at least one trial");
  if (experiment.budget < 1 || experiment.budget == kUnbounded) throw UsageError("budget must be finite and positive");
  const auto [lo, hi] = experiment.size_window();

  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(experiment.trials));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (int t = next++; t < experiment.trials; t = next++) {
      try {
        std::seed_seq seq{static_cast<std::uint32_t>(experiment.seed),
                          static_cast<std::uint32_t>(experiment.seed >> 32),
                          static_cast<std::uint32_t>(t)};
        std::mt19937_64 rng(seq);
        const Tree tree = sample_tree(experiment.law, lo, hi, rng, experiment.limits);
        Trial trial = run_budgeted(tree, experiment.budget);
        trial.trial = t;
        result.trials[static_cast<std::size_t>(t)] = trial;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  int threads = experiment.threads > 0 ? experiment.threads
                                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, experiment.trials);
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  double sum = 0.0;
  for (const auto& trial : result.trials) sum += trial.ratio;
  result.mean_ratio = sum / static_cast<double>(result.trials.size());
  result.predicted = predicted_ratio(experiment.law.prediction_sigma2(), experiment.budget);
  return result;
}

std::string format_csv(const Experiment& experiment, const ExperimentResult& result) {
  std::ostringstream out;
  out << "# law=" << experiment.law.name() << " seed=" << experiment.seed
      << " generator=" << kGeneratorId << " sigma2=" << experiment.law.prediction_sigma2() << '\n';
  out << "trial,size,b,jobs,ratio,predicted\n";
  out.precision(6);
  for (const auto& t : result.trials)
    out << t.trial << ',' << t.size << ',' << experiment.budget << ',' << t.jobs << ',' << std::fixed
        << t.ratio << ',' << result.predicted << std::defaultfloat << '\n';
  return out.str();
}

ApplicationDescriptor Application::descriptor() const {
  return {"gwtree", false, {BudgetKind::nodes}, true};
}

JobNode Application::init(std::string_view input) {
  detail::TokenStream in(input);
  if (in.done()) throw InputError(1, "empty input");
  const auto law_token = in.next("offspring law");
  OffspringLaw law = [&] {
    try {
      return OffspringLaw::parse(law_token.text);
    } catch (const UsageError& e) {
      throw InputError(law_token.line, e.what());
    }
  }();
  const auto n = in.next_int<std::uint64_t>("target size");
  const auto seed = in.next_int<std::uint64_t>("seed");
  if (n < 1) throw InputError(law_token.line, "target size must be positive");
  Experiment shape;
  shape.n = n;
  if (!in.done()) {
    const auto lo = in.next_int<std::uint64_t>("window low");
    const auto hi = in.next_int<std::uint64_t>("window high");
    if (lo < 1 || lo > hi) throw InputError(law_token.line, "empty size window");
    shape.window = std::pair{lo, hi};
  }
  in.expect_done();
  if (shape.size_window().second > 0xffffffffull) throw InputError(law_token.line, "tree too large");

  std::mt19937_64 rng(seed);
  try {
    tree_.emplace(sample_tree(law, shape.size_window().first, shape.size_window().second, rng));
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  ByteWriter root;
  root.put_u32(0);
  return {std::move(root).bytes(), 0};
}

namespace {

std::uint32_t decode_node(const Tree& tree, std::string_view payload) {
  ByteReader in(payload);
  const std::uint32_t v = in.get_u32();
  in.expect_end();
  if (v >= tree.size()) throw InputError("gwtree node out of range");
  return v;
}

}  // namespace

SearchResult Application::search(const JobNode& node, const Budget& budget,
                                 const SearchContext& context) const {
  const Tree& tree = *tree_;
  const std::uint32_t start = decode_node(tree, node.payload);
  return rs::run_job(
      Oracle(tree), start, start == 0, budget, context, rs::PruneMode::off,
      [](std::uint32_t v) { return std::to_string(v + 1); },
      [](std::uint32_t v) {
        ByteWriter out;
        out.put_u32(v);
        return std::move(out).bytes();
      });
}

void Application::validate_node(std::string_view payload) const { decode_node(*tree_, payload); }

}  // namespace mts::gw
