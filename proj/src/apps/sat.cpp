#include "mts/apps/sat.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "mts/codec.hpp"
#include "mts/error.hpp"

namespace mts::sat {

// ---- DIMACS ----------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long long parse_int(std::string_view token, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw InputError(line, "expected an integer, got '" + std::string(token) + "'");
  return value;
}

// Sorted, duplicate-free; nullopt for a tautology.
std::optional<std::vector<int>> normalise(std::vector<int> clause) {
  std::sort(clause.begin(), clause.end(), [](int a, int b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  for (std::size_t i = 0; i + 1 < clause.size(); ++i)
    if (clause[i] == -clause[i + 1]) return std::nullopt;
  return clause;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula formula;
  bool have_header = false;
  long long declared = 0;
  long long parsed = 0;
  std::vector<int> current;
  std::size_t line_no = 0;
  std::size_t last_line = 0;

  auto finish_clause = [&] {
    ++parsed;
    if (auto clause = normalise(std::move(current))) formula.clauses.push_back(std::move(*clause));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == 'c') continue;
    if (line.front() == '%') break;
    last_line = line_no;

    std::istringstream fields{std::string(line)};
    std::string token;
    if (line.front() == 'p') {
      if (have_header) throw InputError(line_no, "duplicate problem line");
      std::string p, cnf, vars, count, extra;
      if (!(fields >> p >> cnf >> vars >> count) || p != "p" || cnf != "cnf" || (fields >> extra))
        throw InputError(line_no, "malformed problem line, expected 'p cnf <vars> <clauses>'");
      const long long v = parse_int(vars, line_no);
      declared = parse_int(count, line_no);
      if (v < 0 || v > 1'000'000'000 || declared < 0) throw InputError(line_no, "negative or oversized header value");
      formula.num_vars = static_cast<int>(v);
      have_header = true;
      continue;
    }
    if (!have_header) throw InputError(line_no, "clause before problem line");
    while (fields >> token) {
      const long long lit = parse_int(token, line_no);
      if (lit == 0) {
        finish_clause();
        continue;
      }
      if (std::llabs(lit) > formula.num_vars)
        throw InputError(line_no, "literal " + token + " out of range for " +
                                      std::to_string(formula.num_vars) + " variables");
      current.push_back(static_cast<int>(lit));
    }
  }
  if (!have_header) throw InputError(line_no == 0 ? 1 : line_no, "missing problem line");
  if (!current.empty()) finish_clause();
  if (parsed != declared)
    throw InputError(last_line == 0 ? 1 : last_line, "header declares " + std::to_string(declared) +
                                                        " clauses, found " + std::to_string(parsed));
  return formula;
}

bool satisfies(const CnfFormula& formula, std::span<const int> model) {
  if (static_cast<int>(model.size()) < formula.num_vars + 1) return false;
  for (const auto& clause : formula.clauses) {
    bool sat = false;
    for (int lit : clause)
      if (model[std::abs(lit)] == lit) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

// ---- Solver ----------------------------------------------------------------

namespace {

// Luby sequence 1,1,2,1,1,2,4,1,... (0-based index).
std::uint64_t luby(std::uint64_t index) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < index + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != index) {
    size = (size - 1) / 2;
    --seq;
    index %= size;
  }
  return std::uint64_t{1} << seq;
}

}  // namespace

Solver::Solver(const CnfFormula& formula, SolverOptions options)
    : options_(options),
      num_vars_(formula.num_vars),
      watches_(2 * static_cast<std::size_t>(formula.num_vars)),
      assigns_(formula.num_vars + 1, 0),
      level_(formula.num_vars + 1, 0),
      reason_(formula.num_vars + 1, kNoReason),
      activity_(formula.num_vars + 1, 0.0) {
  for (const auto& clause : formula.clauses) {
    if (!ok_) break;
    if (clause.empty()) {
      ok_ = false;
      initial_conflict_.clear();
      break;
    }
    if (clause.size() == 1) {
      const int v = value(clause[0]);
      if (v < 0) {
        ok_ = false;
        initial_conflict_ = clause;
      } else if (v == 0) {
        enqueue(encode(clause[0]), kNoReason);
      }
      continue;
    }
    std::vector<Code> codes;
    for (int lit : clause) codes.push_back(encode(lit));
    attach(std::move(codes));
  }
  if (ok_) {
    if (auto conflict = propagate()) {
      ok_ = false;
      initial_conflict_ = *conflict;
    }
  }
}

int Solver::value_code(Code c) const {
  const int v = assigns_[c / 2 + 1];
  return (c & 1) ? -v : v;
}

int Solver::value(int lit) const { return value_code(encode(lit)); }

std::vector<int> Solver::trail() const {
  std::vector<int> out;
  out.reserve(trail_.size());
  for (Code c : trail_) out.push_back(decode(c));
  return out;
}

void Solver::enqueue(Code c, int reason) {
  const int var = static_cast<int>(c / 2 + 1);
  assigns_[var] = (c & 1) ? -1 : 1;
  level_[var] = decision_level();
  reason_[var] = reason;
  trail_.push_back(c);
}

void Solver::backtrack(int level) {
  if (decision_level() <= level) return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
    const int var = static_cast<int>(trail_[i] / 2 + 1);
    assigns_[var] = 0;
    reason_[var] = kNoReason;
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = std::min(qhead_, trail_.size());
}

int Solver::attach(std::vector<Code> clause) {
  const int index = static_cast<int>(clauses_.size());
  watches_[clause[0]].push_back(index);
  watches_[clause[1]].push_back(index);
  clauses_.push_back(std::move(clause));
  return index;
}

bool Solver::add_unit(int lit) {
  if (std::abs(lit) < 1 || std::abs(lit) > num_vars_) return false;
  backtrack(0);
  const int v = value(lit);
  if (v < 0) return false;
  if (v == 0) enqueue(encode(lit), kNoReason);
  return true;
}

void Solver::decide(int lit) {
  trail_lim_.push_back(trail_.size());
  enqueue(encode(lit), kNoReason);
}

int Solver::propagate_index() {
  while (qhead_ < trail_.size()) {
    const Code falsified = trail_[qhead_++] ^ 1u;
    auto& watching = watches_[falsified];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < watching.size(); ++i) {
      const int ci = watching[i];
      auto& clause = clauses_[ci];
      if (clause[0] == falsified) std::swap(clause[0], clause[1]);
      if (value_code(clause[0]) > 0) {
        watching[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < clause.size(); ++k) {
        if (value_code(clause[k]) >= 0) {
          std::swap(clause[1], clause[k]);
          watches_[clause[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      watching[keep++] = ci;
      if (value_code(clause[0]) < 0) {
        for (std::size_t r = i + 1; r < watching.size(); ++r) watching[keep++] = watching[r];
        watching.resize(keep);
        qhead_ = trail_.size();
        return ci;
      }
      enqueue(clause[0], ci);
    }
    watching.resize(keep);
  }
  return -1;
}

std::optional<std::vector<int>> Solver::propagate() {
  last_conflict_ = propagate_index();
  if (last_conflict_ < 0) return std::nullopt;
  std::vector<int> out;
  for (Code c : clauses_[last_conflict_]) out.push_back(decode(c));
  return out;
}

Solver::Analysis Solver::analyze_last_conflict() { return analyze(last_conflict_); }

void Solver::bump(int var) {
  if (!options_.vsids) return;
  activity_[var] += activity_inc_;
  if (activity_[var] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    activity_inc_ *= 1e-100;
  }
}

Solver::Analysis Solver::analyze(int conflict) {
  std::vector<char> seen(num_vars_ + 1, 0);
  std::vector<Code> learnt{0};  // slot for the asserting literal
  int pending = 0;
  Code p = 0;
  bool have_p = false;
  std::size_t index = trail_.size();
  int reason = conflict;

  do {
    const auto& clause = clauses_[reason];
    for (std::size_t k = have_p ? 1 : 0; k < clause.size(); ++k) {
      const Code q = clause[k];
      const int var = static_cast<int>(q / 2 + 1);
      if (seen[var] || level_[var] == 0) continue;
      seen[var] = 1;
      bump(var);
      if (level_[var] >= decision_level())
        ++pending;
      else
        learnt.push_back(q);
    }
    while (!seen[trail_[--index] / 2 + 1]) {
    }
    p = trail_[index];
    have_p = true;
    const int var = static_cast<int>(p / 2 + 1);
    reason = reason_[var];
    seen[var] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = p ^ 1u;

  Analysis out;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i] / 2 + 1] > level_[learnt[max_i] / 2 + 1]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    out.backjump_level = level_[learnt[1] / 2 + 1];
  }
  for (Code c : learnt) out.learnt.push_back(decode(c));
  activity_inc_ *= 1.0 / 0.95;
  return out;
}

std::optional<int> Solver::pick_branch() const {
  std::optional<int> best;
  for (int var = 1; var <= num_vars_; ++var) {
    if (assigns_[var] != 0) continue;
    if (!options_.vsids) return var;
    if (!best || activity_[var] > activity_[*best]) best = var;
  }
  return best;
}

std::vector<std::vector<int>> Solver::path_splits(std::span<const int> assumption) const {
  std::vector<int> prefix(assumption.begin(), assumption.end());
  std::vector<std::vector<int>> splits;
  std::vector<int> decisions;
  for (int level = static_cast<int>(assumption.size()) + 1; level <= decision_level(); ++level)
    decisions.push_back(decode(trail_[trail_lim_[level - 1]]));

  std::vector<int> current = prefix;
  current.insert(current.end(), decisions.begin(), decisions.end());
  splits.push_back(std::move(current));
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    std::vector<int> flipped = prefix;
    flipped.insert(flipped.end(), decisions.begin(), decisions.begin() + static_cast<std::ptrdiff_t>(i));
    flipped.push_back(-decisions[i]);
    splits.push_back(std::move(flipped));
  }
  return splits;
}

SolveResult Solver::solve(std::span<const int> assumption, SatBudget budget) {
  SolveResult result;
  if (!ok_) {
    result.status = Status::global_unsat;
    return result;
  }
  backtrack(0);
  if (propagate_index() >= 0) {
    ok_ = false;
    result.status = Status::global_unsat;
    return result;
  }

  const int assumed_levels = static_cast<int>(assumption.size());
  std::uint64_t since_restart = 0;
  std::uint64_t restart_index = 0;
  auto restart_limit = [&] { return luby(restart_index) * options_.restart_base; };

  auto budget_spent = [&] {
    if (budget.limit == kUnbounded) return false;
    const std::uint64_t used = budget.kind == BudgetKind::conflicts ? result.conflicts : result.decisions;
    return used >= budget.limit;
  };

  while (true) {
    const int conflict = propagate_index();
    if (conflict >= 0) {
      ++result.conflicts;
      ++since_restart;
      if (decision_level() == 0) {
        ok_ = false;
        result.status = Status::global_unsat;
        return result;
      }
      Analysis a = analyze(conflict);
      backtrack(a.backjump_level);
      if (a.learnt.size() == 1) {
        enqueue(encode(a.learnt[0]), kNoReason);
        result.learnt_units.push_back(a.learnt[0]);
      } else {
        std::vector<Code> codes;
        for (int lit : a.learnt) codes.push_back(encode(lit));
        const int index = attach(std::move(codes));
        enqueue(clauses_[index][0], index);
      }
      continue;
    }

    const bool beyond_assumption = decision_level() > assumed_levels;
    if (options_.restarts && beyond_assumption && since_restart >= restart_limit()) {
      auto splits = path_splits(assumption);
      result.splits.insert(result.splits.end(), splits.begin(), splits.end());
      backtrack(0);
      since_restart = 0;
      ++restart_index;
      continue;
    }

    if (decision_level() < assumed_levels) {
      const int lit = assumption[decision_level()];
      const int v = value(lit);
      if (v < 0) {
        result.status = Status::unsat_under_assumption;
        return result;
      }
      trail_lim_.push_back(trail_.size());
      if (v == 0) enqueue(encode(lit), kNoReason);
      continue;
    }

    // A job always makes at least one decision of its own before giving
    // up, so every split is strictly longer than its assumption.
    if (beyond_assumption && budget_spent()) {
      auto splits = path_splits(assumption);
      result.splits.insert(result.splits.end(), splits.begin(), splits.end());
      result.status = Status::exhausted;
      return result;
    }

    const auto var = pick_branch();
    if (!var) {
      result.status = Status::sat;
      result.model.assign(num_vars_ + 1, 0);
      for (int v = 1; v <= num_vars_; ++v) result.model[v] = assigns_[v] > 0 ? v : -v;
      return result;
    }
    ++result.decisions;
    decide(*var);
  }
}

PropagationResult propagate(const CnfFormula& formula, std::span<const int> assignment) {
  PropagationResult out;
  Solver solver(formula);
  if (!solver.ok()) {
    out.conflict = solver.initial_conflict();
    return out;
  }
  for (int lit : assignment) {
    const int v = solver.value(lit);
    if (v > 0) continue;
    if (v < 0) {
      out.conflict = std::vector<int>{lit};
      return out;
    }
    solver.decide(lit);
    if (auto conflict = solver.propagate()) {
      out.conflict = std::move(conflict);
      return out;
    }
  }
  out.assignment = solver.trail();
  return out;
}

SolveResult solve_budgeted(const CnfFormula& formula, std::span<const int> assumption,
                           SatBudget budget, std::span<const int> shared_units,
                           SolverOptions options) {
  Solver solver(formula, options);
  for (int lit : shared_units) {
    if (!solver.add_unit(lit)) {
      SolveResult result;
      result.status = Status::global_unsat;
      return result;
    }
  }
  return solver.solve(assumption, budget);
}

// ---- Encoding ----------------------------------------------------------------

std::string encode_assumption(std::span<const int> assumption) {
  ByteWriter out;
  for (int lit : assumption) out.put_i32(lit);
  return std::move(out).bytes();
}

std::vector<int> decode_assumption(std::string_view payload, int num_vars) {
  if (payload.size() % 4 != 0) throw InputError("sat node payload length is not a multiple of 4");
  ByteReader in(payload);
  std::vector<int> lits;
  std::vector<char> used(num_vars + 1, 0);
  while (in.remaining() > 0) {
    const int lit = in.get_i32();
    if (lit == 0 || lit < -num_vars || lit > num_vars) throw InputError("sat node literal out of range");
    if (used[std::abs(lit)]) throw InputError("sat node assigns a variable twice");
    used[std::abs(lit)] = 1;
    lits.push_back(lit);
  }
  return lits;
}

std::string encode_unit(int lit) { return std::to_string(lit); }

std::optional<int> decode_unit(std::string_view token) {
  int lit = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), lit);
  if (ec != std::errc{} || ptr != token.data() + token.size() || lit == 0) return std::nullopt;
  return lit;
}

// ---- Application ---------------------------------------------------------------

ApplicationDescriptor Application::descriptor() const {
  return {"sat", true, {BudgetKind::decisions, BudgetKind::conflicts}, false};
}

JobNode Application::init(std::string_view input) {
  if (trim(input).empty()) throw InputError(1, "empty input");
  formula_ = parse_dimacs(input);
  return {encode_assumption({}), 0};
}

SearchResult Application::search(const JobNode& node, const Budget& budget,
                                 const SearchContext& context) const {
  const auto assumption = decode_assumption(node.payload, formula_.num_vars);
  std::vector<int> units;
  for (const auto& token : context.shared) {
    auto lit = decode_unit(token);
    if (!lit) throw InputError("malformed shared unit '" + token + "'");
    units.push_back(*lit);
  }

  const SatBudget sat_budget{budget.kind == BudgetKind::conflicts ? BudgetKind::conflicts : BudgetKind::decisions,
                             budget.max_nodes};
  SolveResult solved = solve_budgeted(formula_, assumption, sat_budget, units, options_);

  SearchResult result;
  result.visited = sat_budget.kind == BudgetKind::conflicts ? solved.conflicts : solved.decisions;
  for (int lit : solved.learnt_units) result.shared_delta.push_back(encode_unit(lit));

  switch (solved.status) {
    case Status::sat: {
      std::string values = "v";
      for (int v = 1; v <= formula_.num_vars; ++v) values += ' ' + std::to_string(solved.model[v]);
      values += " 0";
      result.outputs = {"s SATISFIABLE", std::move(values)};
      result.output_count = 1;
      result.verdict = true;
      result.stop_run = true;
      return result;
    }
    case Status::global_unsat:
      result.outputs = {"s UNSATISFIABLE"};
      result.verdict = true;
      result.stop_run = true;
      return result;
    case Status::unsat_under_assumption:
    case Status::exhausted:
      break;
  }
  for (const auto& split : solved.splits)
    result.unexplored.push_back({encode_assumption(split), static_cast<std::uint32_t>(split.size())});
  return result;
}

void Application::validate_node(std::string_view payload) const {
  decode_assumption(payload, formula_.num_vars);
}

std::vector<std::string> Application::finish(std::span<const std::string>, const RunSummary& summary) const {
  if (summary.stopped_early) return {};
  // Every job refuted its assumption.
  return {"s UNSATISFIABLE"};
}

}  // namespace mts::sat
