#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mts/search_api.hpp"

namespace mts::gw {

inline constexpr std::string_view kGeneratorId = "mt19937_64";

enum class LawKind { catalan, fullbinary, geometric, poisson, binomial, uniform };

// Critical offspring distribution (mean exactly one).
class OffspringLaw {
 public:
  // Accepted names: catalan, fullbinary, geometric, poisson, binomial(k),
  // uniform(k). Throws UsageError for unknown names or non-critical
  // parameters.
  static OffspringLaw parse(std::string_view name);
  static OffspringLaw catalan() { return parse("catalan"); }
  static OffspringLaw full_binary() { return parse("fullbinary"); }

  LawKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int parameter() const { return k_; }
  double mean() const { return 1.0; }
  // Exact Var(xi).
  double variance() const;
  // sigma^2 plugged into the job-list prediction. Defaults to the variance
  // except for catalan, where the published constant uses 3/2.
  double prediction_sigma2() const { return prediction_sigma2_; }
  void set_prediction_sigma2(double value) { prediction_sigma2_ = value; }

  std::uint32_t sample(std::mt19937_64& rng) const;

 private:
  OffspringLaw(LawKind kind, std::string name, int k);

  LawKind kind_;
  std::string name_;
  int k_ = 0;
  double prediction_sigma2_ = 0.0;
};

double offspring_variance(const OffspringLaw& law);

// sqrt(pi * sigma2 / (8 b)): limiting fraction of nodes returned to the
// job list by budgeted search with node budget b.
double predicted_ratio(double sigma2, std::uint64_t budget);

// Ordered rooted tree stored as its preorder offspring sequence.
class Tree {
 public:
  explicit Tree(std::vector<std::uint32_t> offspring);

  std::size_t size() const { return offspring_.size(); }
  const std::vector<std::uint32_t>& offspring() const { return offspring_; }
  std::uint32_t degree(std::uint32_t v) const { return offspring_[v]; }
  // k-th child (0-based).
  std::uint32_t child(std::uint32_t v, std::uint32_t k) const { return children_[first_child_[v] + k]; }
  std::uint32_t parent(std::uint32_t v) const { return parent_[v]; }
  // Position of v among its parent's children (0-based).
  std::uint32_t sibling_index(std::uint32_t v) const { return sibling_index_[v]; }
  std::uint32_t max_degree() const { return max_degree_; }

 private:
  std::vector<std::uint32_t> offspring_;
  std::vector<std::uint32_t> first_child_;
  std::vector<std::uint32_t> children_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> sibling_index_;
  std::uint32_t max_degree_ = 0;
};

// Search-tree view of a sampled tree: adj(v, j) is the j-th child and f is
// the parent link.
class Oracle {
 public:
  using Vertex = std::uint32_t;

  explicit Oracle(const Tree& tree) : tree_(&tree) {}

  std::size_t max_degree() const { return tree_->max_degree(); }
  std::optional<Vertex> adj(Vertex v, std::size_t j) const {
    if (j < 1 || j > tree_->degree(v)) return std::nullopt;
    return tree_->child(v, static_cast<std::uint32_t>(j - 1));
  }
  std::pair<Vertex, std::size_t> local_search(Vertex v) const {
    if (v == 0) return {0, 0};
    return {tree_->parent(v), tree_->sibling_index(v) + 1};
  }

 private:
  const Tree* tree_;
};

struct SampleLimits {
  std::uint64_t max_attempts = 2'000'000;
};

// Draws unconditioned critical GW trees until one has size in [lo, hi].
// Throws std::runtime_error when max_attempts are used up.
Tree sample_tree(const OffspringLaw& law, std::uint64_t lo, std::uint64_t hi, std::mt19937_64& rng,
                 SampleLimits limits = {});

struct Experiment {
  OffspringLaw law = OffspringLaw::catalan();
  // Target size; the sampling window defaults to [n/2, 3n/2].
  std::uint64_t n = 100000;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> window;
  std::uint64_t budget = 5000;
  int trials = 20;
  std::uint64_t seed = 1;
  // Trials run in parallel on this many threads (0: hardware concurrency).
  int threads = 0;
  SampleLimits limits;

  std::pair<std::uint64_t, std::uint64_t> size_window() const;
};

struct Trial {
  int trial = 0;
  std::uint64_t size = 0;
  std::uint64_t jobs = 0;
  // Unexplored nodes returned to the job list over the whole run.
  std::uint64_t returned = 0;
  // Sum of per-job forward steps; equals size - 1.
  std::uint64_t visited = 0;
  double ratio = 0.0;
};

struct ExperimentResult {
  std::vector<Trial> trials;
  double mean_ratio = 0.0;
  double predicted = 0.0;
};

// Budgeted enumeration of one tree with a FIFO job list, static node
// budget and no depth limit.
Trial run_budgeted(const Tree& tree, std::uint64_t budget);

// Seeds each trial independently from (seed, trial index).
ExperimentResult measure_joblist_ratio(const Experiment& experiment);

// CSV with header trial,size,b,jobs,ratio,predicted.
std::string format_csv(const Experiment& experiment, const ExperimentResult& result);

// Engine application enumerating the nodes of one sampled tree. Input:
// "<law> <n> <seed>" optionally followed by "<lo> <hi>".
class Application final : public mts::Application {
 public:
  ApplicationDescriptor descriptor() const override;
  JobNode init(std::string_view input) override;
  SearchResult search(const JobNode& node, const Budget& budget,
                      const SearchContext& context) const override;
  void validate_node(std::string_view payload) const override;

  const Tree& tree() const { return *tree_; }

 private:
  std::optional<Tree> tree_;
};

}  // namespace mts::gw
