#include "mts/engine.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <thread>

#include "mts/codec.hpp"
#include "mts/error.hpp"

namespace mts {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& line : lines) {
    text += line;
    text += '\n';
  }
  return text;
}

}  // namespace

// ---- Worker and consumer -------------------------------------------------

void worker_loop(int id, Channel<MasterMessage>& inbox, Channel<WorkerMessage>& to_master,
                 Channel<ConsumerMessage>& to_consumer) {
  std::shared_ptr<const Application> app;
  bool count_only = false;
  std::vector<std::string> shared;

  while (true) {
    MasterMessage message = inbox.receive();
    if (std::holds_alternative<Terminate>(message)) return;
    if (auto* input = std::get_if<InputData>(&message)) {
      app = std::move(input->app);
      count_only = input->count_only;
      continue;
    }
    auto& assignment = std::get<Assignment>(message);
    for (auto& token : assignment.shared) shared.push_back(std::move(token));

    SearchResult result;
    try {
      if (!app) throw AbortError("assignment received before input data");
      result = app->search(assignment.job, assignment.budget, SearchContext{count_only, shared});
    } catch (const std::exception& e) {
      to_master.send({id, JobFailed{e.what()}});
      continue;
    }

    // Output first, so it is queued at the consumer before the master can
    // observe the job as finished.
    if (!result.outputs.empty())
      to_consumer.send(OutputChunk{join_lines(result.outputs), result.verdict});
    if (count_only && !result.verdict && result.output_count > 0)
      to_consumer.send(CountUpdate{result.output_count});

    JobDone done;
    done.unexplored = std::move(result.unexplored);
    done.shared_delta = std::move(result.shared_delta);
    done.visited = result.visited;
    done.output_count = result.output_count;
    done.stop_run = result.stop_run;
    to_master.send({id, std::move(done)});
  }
}

std::string format_count_line(std::uint64_t count) { return "count " + std::to_string(count) + "\n"; }

void consumer_loop(Channel<ConsumerMessage>& inbox, std::ostream& out, bool count_only) {
  std::uint64_t total = 0;
  bool verdict_written = false;
  while (true) {
    ConsumerMessage message = inbox.receive();
    if (std::holds_alternative<Terminate>(message)) break;
    std::visit(Overloaded{
                   [&](OutputChunk& chunk) {
                     if (chunk.verdict) {
                       if (verdict_written) return;
                       verdict_written = true;
                     }
                     out << chunk.text;
                   },
                   [&](CountUpdate& update) { total += update.count; },
                   [](Terminate&) {},
               },
               message);
  }
  if (count_only) out << format_count_line(total);
  out.flush();
}

// ---- Master --------------------------------------------------------------

Master::Master(SchedulerConfig config, JobList jobs, SharedStore store, CheckpointTotals prior)
    : config_(std::move(config)),
      jobs_(std::move(jobs)),
      store_(std::move(store)),
      prior_(prior),
      in_flight_(static_cast<std::size_t>(config_.num_workers)) {}

std::optional<int> Master::first_free_worker() const {
  for (std::size_t i = 0; i < in_flight_.size(); ++i)
    if (!in_flight_[i]) return static_cast<int>(i);
  return std::nullopt;
}

Assignment Master::assign(int worker) {
  Assignment a;
  a.budget = select_budget(jobs_.size(), config_);
  a.job = jobs_.pop_next();
  a.shared = store_.take_undelivered(worker);
  in_flight_.at(worker) = a.job;
  ++busy_;
  return a;
}

void Master::collect(int worker, JobDone result) {
  unexplored_returned_ += result.unexplored.size();
  jobs_.append(std::move(result.unexplored));
  if (!result.shared_delta.empty()) store_.merge(result.shared_delta);
  frequencies_.push_back(result.visited);
  output_count_ += result.output_count;
  visited_ += result.visited;
  release(worker);
}

void Master::release(int worker) {
  auto& slot = in_flight_.at(worker);
  if (slot) {
    slot.reset();
    --busy_;
  }
}

CheckpointState Master::snapshot(const std::string& app_name) const {
  CheckpointState state;
  state.app_name = app_name;
  for (const auto& job : in_flight_)
    if (job) state.jobs.push_back(*job);
  for (const auto& job : jobs_.entries()) state.jobs.push_back(job);
  state.shared = store_.tokens();
  state.totals = {prior_.output_count + output_count_, prior_.jobs_executed + jobs_executed(),
                  prior_.visited + visited_};
  return state;
}

// ---- Run -----------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

// Owns the worker and consumer contexts. Destruction terminates and joins
// them, also when the master loop exits by exception.
class ProcessGroup {
 public:
  ProcessGroup(int num_workers, std::ostream& out, bool count_only) {
    for (int i = 0; i < num_workers; ++i) worker_inboxes_.push_back(std::make_unique<Channel<MasterMessage>>());
    consumer_ = std::jthread([this, &out, count_only] { consumer_loop(consumer_inbox_, out, count_only); });
    for (int i = 0; i < num_workers; ++i)
      workers_.emplace_back([this, i] { worker_loop(i, *worker_inboxes_[i], master_inbox_, consumer_inbox_); });
  }

  ~ProcessGroup() { shutdown(); }

  void shutdown() {
    if (done_) return;
    done_ = true;
    for (auto& inbox : worker_inboxes_) inbox->send(Terminate{});
    for (auto& worker : workers_) worker.join();
    consumer_inbox_.send(Terminate{});
    consumer_.join();
  }

  Channel<MasterMessage>& worker(int i) { return *worker_inboxes_[i]; }
  int size() const { return static_cast<int>(worker_inboxes_.size()); }
  Channel<WorkerMessage>& master_inbox() { return master_inbox_; }
  Channel<ConsumerMessage>& consumer() { return consumer_inbox_; }

 private:
  Channel<WorkerMessage> master_inbox_;
  Channel<ConsumerMessage> consumer_inbox_;
  std::vector<std::unique_ptr<Channel<MasterMessage>>> worker_inboxes_;
  std::vector<std::jthread> workers_;
  std::jthread consumer_;
  bool done_ = false;
};

}  // namespace

RunReport run(std::shared_ptr<Application> app, std::string_view input,
              const SchedulerConfig& config, std::ostream& out, RunControl* control) {
  config.validate();
  const ApplicationDescriptor descriptor = app->descriptor();
  if (std::find(descriptor.budget_kinds.begin(), descriptor.budget_kinds.end(),
                config.budget_kind) == descriptor.budget_kinds.end())
    throw UsageError("application " + descriptor.name + " does not support budget kind " +
                     std::string(to_string(config.budget_kind)));

  JobNode root = app->init(input);

  JobList jobs;
  SharedStore store;
  CheckpointTotals prior;
  if (config.restart_path) {
    CheckpointState restored = read_checkpoint_file(*config.restart_path, app.get());
    for (auto& job : restored.jobs) jobs.push(std::move(job));
    store.merge(restored.shared);
    prior = restored.totals;
  } else {
    jobs.push(std::move(root));
  }

  const bool count_only = config.count_only && descriptor.enumerates;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  Master master(config, std::move(jobs), std::move(store), prior);
  RunReport report;
  report.restored_jobs = prior.jobs_executed;

  ProcessGroup group(config.num_workers, out, count_only);
  std::shared_ptr<const Application> shared_app = app;
  for (int i = 0; i < group.size(); ++i) group.worker(i).send(InputData{shared_app, count_only});
  if (count_only && prior.output_count > 0) group.consumer().send(CountUpdate{prior.output_count});

  const double tick = config.histogram_tick.count();
  double last_sample = 0.0;
  auto sample = [&] {
    last_sample = elapsed();
    report.metrics.samples.push_back({last_sample, master.busy_workers(), master.jobs().size()});
  };
  sample();

  auto last_checkpoint = Clock::now();
  std::uint64_t jobs_at_checkpoint = 0;
  auto checkpoint_due = [&] {
    if (!config.checkpoint_path) return false;
    bool due = false;
    if (control != nullptr && control->checkpoint_requested.exchange(false)) due = true;
    if (config.checkpoint_interval.count() > 0.0 &&
        Clock::now() - last_checkpoint >= config.checkpoint_interval)
      due = true;
    if (config.checkpoint_every_jobs > 0 &&
        master.jobs_executed() - jobs_at_checkpoint >= config.checkpoint_every_jobs)
      due = true;
    return due;
  };

  bool stopping = false;
  std::optional<std::string> failure;

  auto handle = [&](WorkerMessage& message) {
    const int w = message.worker;
    if (auto* done = std::get_if<JobDone>(&message.body)) {
      const bool stop = done->stop_run;
      master.collect(w, std::move(*done));
      if (stop) {
        stopping = true;
        report.stopped_early = true;
      }
    } else {
      const auto& failed = std::get<JobFailed>(message.body);
      if (!failure) {
        std::string job = master.in_flight(w) ? base64_encode(master.in_flight(w)->payload) : "?";
        failure = "worker " + std::to_string(w) + " failed on job " + job + ": " + failed.what;
      }
      master.release(w);
      stopping = true;
    }
  };

  while (true) {
    while (!stopping && !master.jobs().empty()) {
      auto free = master.first_free_worker();
      if (!free) break;
      group.worker(*free).send(master.assign(*free));
    }
    if (master.busy_workers() == 0 && (stopping || master.jobs().empty())) break;

    const double until_tick = std::max(0.0, tick - (elapsed() - last_sample));
    const auto wait = std::chrono::duration<double>(std::clamp(until_tick, 0.001, 0.05));
    auto message = group.master_inbox().receive_for(wait);
    while (message) {
      handle(*message);
      message = group.master_inbox().try_receive();
    }

    if (elapsed() - last_sample >= tick) sample();

    if (!stopping && checkpoint_due()) {
      write_checkpoint_file(*config.checkpoint_path, master.snapshot(descriptor.name));
      last_checkpoint = Clock::now();
      jobs_at_checkpoint = master.jobs_executed();
    }
    if (!stopping && control != nullptr && control->stop_requested.load()) {
      stopping = true;
      report.interrupted = true;
    }
    if (!stopping && config.stop_after_jobs > 0 && master.jobs_executed() >= config.stop_after_jobs) {
      stopping = true;
      report.interrupted = true;
    }
  }
  sample();

  if (failure) {
    group.shutdown();
    throw AbortError(*failure);
  }

  report.total_output_count = prior.output_count + master.output_count();
  report.total_visited = prior.visited + master.visited();
  report.jobs_executed = master.jobs_executed();
  report.unexplored_returned = master.unexplored_returned();
  report.metrics.frequencies = master.frequencies();

  if (!report.interrupted) {
    RunSummary summary{report.total_output_count, prior.jobs_executed + report.jobs_executed,
                       report.stopped_early};
    auto lines = app->finish(master.store().tokens(), summary);
    if (!lines.empty()) group.consumer().send(OutputChunk{join_lines(lines), false});
  }
  group.shutdown();
  report.wall_time = elapsed();
  return report;
}

}  // namespace mts
