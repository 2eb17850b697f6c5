#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mts/budget.hpp"

namespace mts {

// Root of an unexplored subtree. The payload is produced and interpreted
// only by the owning application.
struct JobNode {
  std::string payload;
  // Depth below the producing job's start vertex. Informational only; not
  // part of node identity and not persisted in checkpoints.
  std::uint32_t origin_depth = 0;

  friend bool operator==(const JobNode& a, const JobNode& b) { return a.payload == b.payload; }
};

struct ApplicationDescriptor {
  std::string name;
  bool supports_shared_data = false;
  std::vector<BudgetKind> budget_kinds;
  // Enumeration applications produce countable outputs; count-only mode
  // applies to them.
  bool enumerates = true;
};

struct SearchResult {
  // Fully formatted output lines, without trailing newlines. Empty in
  // count-only mode unless the lines are verdicts.
  std::vector<std::string> outputs;
  std::uint64_t output_count = 0;
  std::vector<JobNode> unexplored;
  // Budget units consumed by the job.
  std::uint64_t visited = 0;
  std::vector<std::string> shared_delta;
  // The outputs are a final answer (SAT verdict); the consumer prints only
  // the first verdict of a run.
  bool verdict = false;
  // Ask the master to stop issuing jobs.
  bool stop_run = false;
};

struct SearchContext {
  bool count_only = false;
  // Shared tokens known to this worker.
  std::span<const std::string> shared;
};

// Summary the master hands to the application once the job list is done.
struct RunSummary {
  std::uint64_t total_output_count = 0;
  std::uint64_t jobs_executed = 0;
  bool stopped_early = false;
};

// Contract between the engine and a budgeted tree search. init() parses the
// input into immutable global data and returns the root job; after that
// the object is only used through const members, which must be safe to
// call concurrently from several workers.
class Application {
 public:
  virtual ~Application() = default;

  virtual ApplicationDescriptor descriptor() const = 0;

  // Throws InputError on malformed input.
  virtual JobNode init(std::string_view input) = 0;

  // Explores the subtree rooted at node within budget. outputs and the
  // subtrees of unexplored exactly cover the subtree of node. Throws
  // InputError for undecodable payloads.
  virtual SearchResult search(const JobNode& node, const Budget& budget,
                              const SearchContext& context) const = 0;

  // Throws InputError if the payload is not a node of this instance.
  virtual void validate_node(std::string_view payload) const = 0;

  // Called by the master with the final shared data once the main loop has
  // ended. Returned lines go to the consumer after all job output.
  virtual std::vector<std::string> finish(std::span<const std::string> shared,
                                          const RunSummary& summary) const {
    (void)shared;
    (void)summary;
    return {};
  }
};

}  // namespace mts
