#pragma once

#include <string>
#include <vector>

#include "mts/reverse_search.hpp"
#include "mts/search_api.hpp"

namespace mts::rs {

// Runs one budgeted job for a reverse search application and packages the
// result for the engine. The global root is output by the job that starts
// from it; every other vertex is output by the job that reaches it.
template <AdjacencyOracle O, typename Format, typename Encode>
SearchResult run_job(const O& oracle, const typename O::Vertex& start, bool start_is_root,
                     const Budget& budget, const SearchContext& context, PruneMode prune,
                     Format&& format, Encode&& encode, TraversalLimits limits = {}) {
  using Vertex = typename O::Vertex;
  SearchResult result;
  auto emit = [&](const Vertex& v) {
    ++result.output_count;
    if (!context.count_only) result.outputs.push_back(format(v));
  };
  if (start_is_root) emit(start);

  std::vector<std::uint32_t> depths;
  auto traversal = budgeted_search(
      oracle, start, budget.max_depth, budget.max_nodes,
      [&](const Vertex& v, bool unexplored, std::uint64_t depth) {
        emit(v);
        if (unexplored) depths.push_back(static_cast<std::uint32_t>(depth));
      },
      limits);
  result.visited = traversal.count;

  const bool keep_depths = prune == PruneMode::off;
  auto pruned = prune_unexplored(oracle, std::move(traversal.unexplored), prune, emit);
  result.visited += pruned.emitted;

  result.unexplored.reserve(pruned.unexplored.size());
  for (std::size_t i = 0; i < pruned.unexplored.size(); ++i)
    result.unexplored.push_back({encode(pruned.unexplored[i]), keep_depths ? depths[i] : 0u});
  return result;
}

}  // namespace mts::rs
