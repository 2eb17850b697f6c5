#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace mts {

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

enum class BudgetKind { nodes, decisions, conflicts };

std::string_view to_string(BudgetKind kind);
std::optional<BudgetKind> parse_budget_kind(std::string_view text);

// Work limit for a single job. For enumeration, max_nodes counts forward
// steps and max_depth bounds the traversal depth. For SAT, max_nodes is the
// decision or conflict limit (selected by kind) and max_depth is unused.
struct Budget {
  std::uint64_t max_depth = kUnbounded;
  std::uint64_t max_nodes = kUnbounded;
  BudgetKind kind = BudgetKind::nodes;

  static Budget unbounded(BudgetKind kind = BudgetKind::nodes) { return {kUnbounded, kUnbounded, kind}; }
  bool is_unbounded() const { return max_depth == kUnbounded && max_nodes == kUnbounded; }

  friend bool operator==(const Budget&, const Budget&) = default;
};

struct SchedulerConfig {
  int num_workers = 1;
  std::uint64_t base_max_depth = 2;
  std::uint64_t base_max_nodes = 5000;
  std::uint64_t scale = 40;
  double lmin = 1.0;
  double lmax = 3.0;
  BudgetKind budget_kind = BudgetKind::nodes;

  // Workers send per-job counts instead of formatted output.
  bool count_only = false;

  std::optional<std::filesystem::path> checkpoint_path;
  std::optional<std::filesystem::path> restart_path;
  // Periodic checkpointing; zero disables the corresponding trigger.
  std::chrono::duration<double> checkpoint_interval{60.0};
  std::uint64_t checkpoint_every_jobs = 0;

  // Minimum spacing between histogram samples.
  std::chrono::duration<double> histogram_tick{0.1};

  // Stop issuing jobs once this many have completed, as if the run were
  // killed. Zero disables. Used to exercise checkpoint/restart.
  std::uint64_t stop_after_jobs = 0;

  // Throws UsageError when an invariant is violated.
  void validate() const;
};

// Number of processes the budget thresholds are measured against: the
// workers plus the master and the consumer.
inline std::size_t process_count(const SchedulerConfig& config) {
  return static_cast<std::size_t>(config.num_workers) + 2;
}

// Dynamic budget policy. The depth limit applies only while the job list is
// short (below size*lmin); the node budget is multiplied by scale once the
// list is long (above size*lmax). Stateless in the list length.
Budget select_budget(std::size_t joblist_len, const SchedulerConfig& config);

}  // namespace mts
