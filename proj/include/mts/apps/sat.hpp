#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mts/budget.hpp"
#include "mts/search_api.hpp"

namespace mts::sat {

// Literals use DIMACS numbering: +v / -v for variable v in 1..num_vars.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

// Duplicate literals are merged and tautological clauses dropped. Throws
// InputError naming the line for a malformed header, an out-of-range
// literal or a clause count that does not match the header.
CnfFormula parse_dimacs(std::string_view text);

// model[v] is +v or -v; index 0 unused.
bool satisfies(const CnfFormula& formula, std::span<const int> model);

enum class Status { sat, unsat_under_assumption, global_unsat, exhausted };

// The limit is tested before each new decision beyond the assumption, and
// only once the job has made a decision of its own.
struct SatBudget {
  BudgetKind kind = BudgetKind::decisions;
  std::uint64_t limit = kUnbounded;
};

struct SolverOptions {
  // Restarts on a Luby schedule of restart_base conflicts. A restart
  // returns the current backtrack path as splits and resumes from the
  // assumption.
  bool restarts = false;
  std::uint64_t restart_base = 100;
  // Activity-based branching instead of lowest-index-first.
  bool vsids = false;
};

struct SolveResult {
  Status status = Status::exhausted;
  // For sat: model[v] = +v or -v.
  std::vector<int> model;
  // For exhausted (and after restarts): assumptions covering every
  // extension of the job's assumption that was not refuted.
  std::vector<std::vector<int>> splits;
  // Learnt unit clauses; each is implied by the formula alone.
  std::vector<int> learnt_units;
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
};

// Minimal CDCL solver: two-watched-literal propagation, first-UIP learning,
// non-chronological backjumping, solving under assumptions.
class Solver {
 public:
  explicit Solver(const CnfFormula& formula, SolverOptions options = {});

  // False when the formula is refuted at level 0.
  bool ok() const { return ok_; }
  // Asserts lit at level 0. Returns false if that contradicts the current
  // level-0 assignment.
  bool add_unit(int lit);

  SolveResult solve(std::span<const int> assumption, SatBudget budget);

  // ---- Lower-level steps, exposed for testing ----

  // Opens a new decision level and assigns lit. Precondition: lit unassigned.
  void decide(int lit);
  // Unit propagation to fixpoint. Returns the falsified clause on conflict.
  std::optional<std::vector<int>> propagate();

  struct Analysis {
    // Asserting literal first.
    std::vector<int> learnt;
    int backjump_level = 0;
  };
  // First-UIP analysis of the conflict found by the last propagate().
  // Precondition: decision_level() > 0.
  Analysis analyze_last_conflict();

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  // +1 true, -1 false, 0 unassigned.
  int value(int lit) const;
  // Assigned literals in assignment order.
  std::vector<int> trail() const;
  // Clause falsified when the formula was refuted at construction.
  const std::vector<int>& initial_conflict() const { return initial_conflict_; }

 private:
  using Code = std::uint32_t;
  static constexpr int kNoReason = -1;

  static Code encode(int lit) { return lit > 0 ? 2u * (lit - 1) : 2u * (-lit - 1) + 1; }
  static int decode(Code c) { return (c & 1) ? -static_cast<int>(c / 2 + 1) : static_cast<int>(c / 2 + 1); }
  int value_code(Code c) const;

  void enqueue(Code c, int reason);
  void backtrack(int level);
  int attach(std::vector<Code> clause);
  int propagate_index();
  Analysis analyze(int conflict);
  std::optional<int> pick_branch() const;
  std::vector<std::vector<int>> path_splits(std::span<const int> assumption) const;
  void bump(int var);

  SolverOptions options_;
  int num_vars_ = 0;
  bool ok_ = true;
  std::vector<int> initial_conflict_;
  std::vector<std::vector<Code>> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal code: clauses watching it
  std::vector<std::int8_t> assigns_;       // per variable: +1, -1, 0
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Code> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  int last_conflict_ = -1;
  std::vector<double> activity_;
  double activity_inc_ = 1.0;
};

struct PropagationResult {
  // Assigned literals (input literals and implied ones) when no conflict.
  std::vector<int> assignment;
  // Falsified clause on conflict.
  std::optional<std::vector<int>> conflict;
};

// Assigns the given literals and propagates to fixpoint.
PropagationResult propagate(const CnfFormula& formula, std::span<const int> assignment);

// One budgeted job: a fresh solver seeded with shared units, solving under
// assumption. Inconsistent shared units give global_unsat.
SolveResult solve_budgeted(const CnfFormula& formula, std::span<const int> assumption,
                           SatBudget budget, std::span<const int> shared_units,
                           SolverOptions options = {});

std::string encode_assumption(std::span<const int> assumption);
// Throws InputError for malformed payloads, variables out of range or
// repeated variables.
std::vector<int> decode_assumption(std::string_view payload, int num_vars);

std::string encode_unit(int lit);
std::optional<int> decode_unit(std::string_view token);

// Budgeted SAT as an engine application. Jobs are assumptions; learnt unit
// clauses travel as shared data. Prints "s SATISFIABLE" with a "v" line or
// "s UNSATISFIABLE".
class Application final : public mts::Application {
 public:
  explicit Application(SolverOptions options = {}) : options_(options) {}

  ApplicationDescriptor descriptor() const override;
  JobNode init(std::string_view input) override;
  SearchResult search(const JobNode& node, const Budget& budget,
                      const SearchContext& context) const override;
  void validate_node(std::string_view payload) const override;
  std::vector<std::string> finish(std::span<const std::string> shared,
                                  const RunSummary& summary) const override;

  const CnfFormula& formula() const { return formula_; }

 private:
  SolverOptions options_;
  CnfFormula formula_;
};

}  // namespace mts::sat
