#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mts/reverse_search.hpp"
#include "mts/search_api.hpp"

namespace mts::spantree {

// Simple connected undirected graph. Edge index = position in edges.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based endpoints
};

// Text format: "n m" then m lines "u v" (1-based). Rejects self-loops,
// parallel edges and disconnected graphs.
Graph parse_graph(std::string_view text);

// Reverse search over spanning trees by edge exchange. A tree is the sorted
// list of its edge indices. The root is the lexicographically least tree
// (greedy in edge-index order). Index j enumerates (tree edge removed,
// non-tree edge added) pairs in lexicographic order of their positions.
// f adds the least root edge missing from the tree and removes the largest
// edge on the cycle it closes.
class Oracle {
 public:
  using Vertex = std::vector<int>;

  explicit Oracle(Graph graph);

  std::size_t max_degree() const { return degree_; }
  std::optional<Vertex> adj(const Vertex& tree, std::size_t j) const;
  std::pair<Vertex, std::size_t> local_search(const Vertex& tree) const;

  const Vertex& root() const { return root_; }
  const Graph& graph() const { return graph_; }
  bool is_spanning_tree(const Vertex& tree) const;

 private:
  // Edge indices on the tree path between a and b.
  std::vector<int> tree_path(const Vertex& tree, int a, int b) const;
  Vertex complement(const Vertex& tree) const;

  Graph graph_;
  Vertex root_;
  std::size_t non_tree_count_ = 0;
  std::size_t degree_ = 0;
};

std::string encode_vertex(const Oracle::Vertex& tree);
// Throws InputError unless the payload is a spanning tree of the graph.
Oracle::Vertex decode_vertex(const Oracle& oracle, std::string_view payload);

struct Options {
  rs::PruneMode prune = rs::PruneMode::off;
};

class Application final : public mts::Application {
 public:
  explicit Application(Options options = {}) : options_(options) {}

  ApplicationDescriptor descriptor() const override;
  JobNode init(std::string_view input) override;
  SearchResult search(const JobNode& node, const Budget& budget,
                      const SearchContext& context) const override;
  void validate_node(std::string_view payload) const override;

  const Oracle& oracle() const { return *oracle_; }
  static std::string format(const Oracle::Vertex& tree);

 private:
  Options options_;
  std::optional<Oracle> oracle_;
};

}  // namespace mts::spantree
