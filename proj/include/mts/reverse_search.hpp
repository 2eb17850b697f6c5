#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mts/budget.hpp"
#include "mts/error.hpp"

namespace mts::rs {

// An implicit graph with a local search function f defining a spanning tree
// rooted at root(). adj(v, j) for 1 <= j <= max_degree() returns the j-th
// neighbour of v or nothing; local_search(v) returns the parent u of v and
// the index j with adj(u, j) == v. Vertices are compared with ==.
template <typename O>
concept AdjacencyOracle = requires(const O& oracle, const typename O::Vertex& v, std::size_t j) {
  typename O::Vertex;
  { oracle.max_degree() } -> std::convertible_to<std::size_t>;
  { oracle.adj(v, j) } -> std::same_as<std::optional<typename O::Vertex>>;
  { oracle.local_search(v) } -> std::same_as<std::pair<typename O::Vertex, std::size_t>>;
  { v == v } -> std::convertible_to<bool>;
};

template <typename Vertex>
struct TraversalResult {
  // Forward steps taken.
  std::uint64_t count = 0;
  // Vertices output with the unexplored flag set, in output order.
  std::vector<Vertex> unexplored;
};

struct TraversalLimits {
  // Hard cap on oracle steps (forward plus backtrack) guarding against an
  // oracle whose f is inconsistent.
  std::uint64_t step_cap = kUnbounded;
};

// True when w = adj(v, j) is a child of v in the reverse search tree.
template <AdjacencyOracle O>
bool is_tree_child(const O& oracle, const typename O::Vertex& v, std::size_t j,
                   const typename O::Vertex& w) {
  auto [parent, index] = oracle.local_search(w);
  return index == j && parent == v;
}

// Budgeted reverse search from start. Every vertex reached by a forward
// step is passed to sink(vertex, unexplored, depth); the start vertex is
// not. A vertex is flagged unexplored, and not descended into, once count
// reaches max_nodes or depth reaches max_depth; after that every remaining
// child met while backtracking to start is flagged as well.
template <AdjacencyOracle O, typename Sink>
TraversalResult<typename O::Vertex> budgeted_search(const O& oracle, typename O::Vertex start,
                                                    std::uint64_t max_depth, std::uint64_t max_nodes,
                                                    Sink&& sink, TraversalLimits limits = {}) {
  using Vertex = typename O::Vertex;
  TraversalResult<Vertex> result;
  const std::size_t degree = oracle.max_degree();

  Vertex v = std::move(start);
  std::size_t j = 0;
  std::uint64_t depth = 0;
  std::uint64_t steps = 0;

  auto guard = [&] {
    if (++steps > limits.step_cap)
      throw AbortError("reverse search exceeded its step cap; the local search function is inconsistent");
  };

  do {
    bool unexplored = false;
    while (j < degree && !unexplored) {
      ++j;
      std::optional<Vertex> next = oracle.adj(v, j);
      if (next && is_tree_child(oracle, v, j, *next)) {
        guard();
        v = std::move(*next);
        j = 0;
        ++result.count;
        ++depth;
        if (result.count >= max_nodes || depth == max_depth) unexplored = true;
        sink(static_cast<const Vertex&>(v), unexplored, depth);
        if (unexplored) result.unexplored.push_back(v);
      }
    }
    if (depth > 0) {
      guard();
      auto [parent, index] = oracle.local_search(v);
      v = std::move(parent);
      j = index;
      --depth;
    }
  } while (!(depth == 0 && j == degree));
  return result;
}

// Unbudgeted reverse search; identical to budgeted_search with both limits
// unbounded.
template <AdjacencyOracle O, typename Sink>
std::uint64_t reverse_search(const O& oracle, typename O::Vertex start, Sink&& sink,
                             TraversalLimits limits = {}) {
  return budgeted_search(oracle, std::move(start), kUnbounded, kUnbounded,
                         [&](const typename O::Vertex& v, bool, std::uint64_t depth) { sink(v, depth); },
                         limits)
      .count;
}

template <AdjacencyOracle O>
std::uint64_t count_subtree(const O& oracle, typename O::Vertex start) {
  return reverse_search(oracle, std::move(start), [](const auto&, std::uint64_t) {});
}

// Children of v, stopping after `limit` have been found.
template <AdjacencyOracle O>
std::vector<typename O::Vertex> tree_children(const O& oracle, const typename O::Vertex& v,
                                              std::size_t limit = static_cast<std::size_t>(-1)) {
  std::vector<typename O::Vertex> out;
  for (std::size_t j = 1; j <= oracle.max_degree() && out.size() < limit; ++j) {
    auto next = oracle.adj(v, j);
    if (next && is_tree_child(oracle, v, j, *next)) out.push_back(std::move(*next));
  }
  return out;
}

enum class PruneMode { off, leaves, paths };

template <typename Vertex>
struct PruneResult {
  std::vector<Vertex> unexplored;
  // Vertices emitted while walking chains; part of this job's work.
  std::uint64_t emitted = 0;
};

// Filters an unexplored list so that cheap subtrees are finished locally.
// PruneMode::leaves drops vertices without children. PruneMode::paths also
// follows single-child chains, emitting each vertex below the listed one,
// and keeps only the first vertex with two or more children. Emitted
// vertices go to sink(vertex).
template <AdjacencyOracle O, typename Sink>
PruneResult<typename O::Vertex> prune_unexplored(const O& oracle, std::vector<typename O::Vertex> list,
                                                 PruneMode mode, Sink&& sink) {
  PruneResult<typename O::Vertex> result;
  if (mode == PruneMode::off) {
    result.unexplored = std::move(list);
    return result;
  }
  for (auto& v : list) {
    auto children = tree_children(oracle, v, 2);
    if (children.empty()) continue;
    if (mode == PruneMode::leaves || children.size() >= 2) {
      result.unexplored.push_back(std::move(v));
      continue;
    }
    // Single child: walk down the chain.
    auto current = std::move(children.front());
    while (true) {
      sink(static_cast<const typename O::Vertex&>(current));
      ++result.emitted;
      auto next = tree_children(oracle, current, 2);
      if (next.empty()) break;
      if (next.size() >= 2) {
        result.unexplored.push_back(std::move(current));
        break;
      }
      current = std::move(next.front());
    }
  }
  return result;
}

}  // namespace mts::rs
