#include "mts/budget.hpp"

#include "mts/error.hpp"

namespace mts {

std::string_view to_string(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::nodes: return "nodes";
    case BudgetKind::decisions: return "decisions";
    case BudgetKind::conflicts: return "conflicts";
  }
  return "nodes";
}

std::optional<BudgetKind> parse_budget_kind(std::string_view text) {
  if (text == "nodes") return BudgetKind::nodes;
  if (text == "decisions") return BudgetKind::decisions;
  if (text == "conflicts") return BudgetKind::conflicts;
  return std::nullopt;
}

void SchedulerConfig::validate() const {
  if (num_workers < 1) throw UsageError("number of workers must be at least 1");
  if (base_max_depth < 1) throw UsageError("max depth must be at least 1");
  if (base_max_nodes < 1) throw UsageError("max nodes must be at least 1");
  if (scale < 1) throw UsageError("scale must be at least 1");
  if (!(lmin > 0.0) || !(lmax > 0.0)) throw UsageError("lmin and lmax must be positive");
  if (lmin > lmax) throw UsageError("lmin must not exceed lmax");
  if (histogram_tick.count() < 0.0) throw UsageError("histogram tick must be nonnegative");
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == kUnbounded || b == kUnbounded) return kUnbounded;
  if (a != 0 && b > kUnbounded / a) return kUnbounded;
  return a * b;
}

}  // namespace

Budget select_budget(std::size_t joblist_len, const SchedulerConfig& config) {
  const double size = static_cast<double>(process_count(config));
  const double len = static_cast<double>(joblist_len);

  Budget budget;
  budget.kind = config.budget_kind;
  budget.max_depth = len < size * config.lmin ? config.base_max_depth : kUnbounded;
  budget.max_nodes = len > size * config.lmax ? saturating_mul(config.scale, config.base_max_nodes)
                                              : config.base_max_nodes;
  return budget;
}

}  // namespace mts
