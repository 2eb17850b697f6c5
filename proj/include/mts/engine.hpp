#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mts/budget.hpp"
#include "mts/channel.hpp"
#include "mts/checkpoint.hpp"
#include "mts/job_list.hpp"
#include "mts/metrics.hpp"
#include "mts/search_api.hpp"

namespace mts {

// ---- Messages ------------------------------------------------------------

struct Terminate {};

// Sent once to each worker before any assignment.
struct InputData {
  std::shared_ptr<const Application> app;
  bool count_only = false;
};

struct Assignment {
  JobNode job;
  Budget budget;
  // Shared tokens this worker has not seen yet.
  std::vector<std::string> shared;
};

using MasterMessage = std::variant<InputData, Assignment, Terminate>;

struct JobDone {
  std::vector<JobNode> unexplored;
  std::vector<std::string> shared_delta;
  std::uint64_t visited = 0;
  std::uint64_t output_count = 0;
  bool stop_run = false;
};

struct JobFailed {
  std::string what;
};

struct WorkerMessage {
  int worker = 0;
  std::variant<JobDone, JobFailed> body;
};

struct OutputChunk {
  std::string text;
  bool verdict = false;
};

struct CountUpdate {
  std::uint64_t count = 0;
};

using ConsumerMessage = std::variant<OutputChunk, CountUpdate, Terminate>;

// ---- Process loops -------------------------------------------------------

// Receives InputData, then runs assignments until Terminate. Exceptions from
// the application are reported to the master as JobFailed.
void worker_loop(int id, Channel<MasterMessage>& inbox, Channel<WorkerMessage>& to_master,
                 Channel<ConsumerMessage>& to_consumer);

// Writes chunks verbatim in arrival order until Terminate. Only the first
// verdict chunk is written. In count-only mode the counts are summed and a
// single line is written at the end.
void consumer_loop(Channel<ConsumerMessage>& inbox, std::ostream& out, bool count_only);

std::string format_count_line(std::uint64_t count);

// ---- Master state --------------------------------------------------------

// Bookkeeping of the master: job list, shared store, worker status and
// per-job metrics. Contains no threading; the engine drives it.
class Master {
 public:
  Master(SchedulerConfig config, JobList jobs, SharedStore store, CheckpointTotals prior = {});

  std::optional<int> first_free_worker() const;
  bool is_working(int worker) const { return in_flight_.at(worker).has_value(); }
  int busy_workers() const { return busy_; }

  // Removes the next job and marks the worker busy. Preconditions: the
  // worker is free and the job list is not empty.
  Assignment assign(int worker);

  // Joins the result into the job list and shared store and frees the
  // worker. Precondition: the worker is busy.
  void collect(int worker, JobDone result);

  // Frees a worker whose job failed; the job is dropped.
  void release(int worker);

  const JobList& jobs() const { return jobs_; }
  const SharedStore& store() const { return store_; }
  const std::vector<std::uint64_t>& frequencies() const { return frequencies_; }
  std::uint64_t jobs_executed() const { return frequencies_.size(); }
  std::uint64_t output_count() const { return output_count_; }
  std::uint64_t visited() const { return visited_; }
  std::uint64_t unexplored_returned() const { return unexplored_returned_; }
  const CheckpointTotals& prior() const { return prior_; }
  const std::optional<JobNode>& in_flight(int worker) const { return in_flight_.at(worker); }

  // Pending work (in-flight jobs first, then the job list) with totals of
  // completed jobs.
  CheckpointState snapshot(const std::string& app_name) const;

 private:
  SchedulerConfig config_;
  JobList jobs_;
  SharedStore store_;
  CheckpointTotals prior_;
  std::vector<std::optional<JobNode>> in_flight_;
  int busy_ = 0;
  std::vector<std::uint64_t> frequencies_;
  std::uint64_t output_count_ = 0;
  std::uint64_t visited_ = 0;
  std::uint64_t unexplored_returned_ = 0;
};

// ---- Runs ----------------------------------------------------------------

struct RunReport {
  // Includes totals restored from a checkpoint.
  std::uint64_t total_output_count = 0;
  std::uint64_t total_visited = 0;
  // Jobs completed in this run; equals metrics.frequencies.size().
  std::uint64_t jobs_executed = 0;
  std::uint64_t restored_jobs = 0;
  // Unexplored nodes returned to the job list over the run.
  std::uint64_t unexplored_returned = 0;
  double wall_time = 0.0;
  RunMetrics metrics;
  // Stopped by stop_after_jobs or a stop request; pending work was lost.
  bool interrupted = false;
  // An application asked to stop (SAT verdict).
  bool stopped_early = false;
};

// Asynchronous requests, typically raised from signal handlers.
struct RunControl {
  std::atomic<bool> checkpoint_requested{false};
  std::atomic<bool> stop_requested{false};
};

// Parses input with app, then runs one master, one consumer and
// config.num_workers workers until the job list is exhausted. Output goes to
// out. Throws InputError before any worker starts if the input does not
// parse, UsageError for invalid configuration, AbortError if a worker fails.
RunReport run(std::shared_ptr<Application> app, std::string_view input,
              const SchedulerConfig& config, std::ostream& out, RunControl* control = nullptr);

}  // namespace mts
