#include "mts/apps/spantree.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "../text_input.hpp"
#include "mts/codec.hpp"
#include "mts/error.hpp"
#include "mts/reverse_search_job.hpp"

namespace mts::spantree {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

Graph parse_graph(std::string_view text) {
  detail::TokenStream in(text);
  if (in.done()) throw InputError(1, "empty input");
  Graph g;
  const std::size_t header_line = in.line();
  g.n = in.next_int<int>("vertex count");
  const int m = in.next_int<int>("edge count");
  if (g.n < 1) throw InputError(header_line, "vertex count must be positive");
  if (m < 0) throw InputError(header_line, "edge count must be nonnegative");
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < m; ++i) {
    const std::size_t line = in.line();
    int u = in.next_int<int>("edge endpoint");
    int v = in.next_int<int>("edge endpoint");
    if (u < 1 || u > g.n || v < 1 || v > g.n) throw InputError(line, "vertex out of range");
    if (u == v) throw InputError(line, "self-loop");
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw InputError(line, "parallel edge");
    g.edges.emplace_back(u - 1, v - 1);
  }
  in.expect_done();
  DisjointSets sets(g.n);
  int components = g.n;
  for (auto [u, v] : g.edges)
    if (sets.unite(u, v)) --components;
  if (components != 1) throw InputError("graph is not connected");
  return g;
}

Oracle::Oracle(Graph graph) : graph_(std::move(graph)) {
  DisjointSets sets(graph_.n);
  for (int e = 0; e < static_cast<int>(graph_.edges.size()); ++e)
    if (sets.unite(graph_.edges[e].first, graph_.edges[e].second)) root_.push_back(e);
  if (static_cast<int>(root_.size()) != graph_.n - 1) throw InputError("graph is not connected");
  non_tree_count_ = graph_.edges.size() - root_.size();
  degree_ = root_.size() * non_tree_count_;
}

std::vector<int> Oracle::tree_path(const Vertex& tree, int a, int b) const {
  std::vector<std::vector<std::pair<int, int>>> adjacency(graph_.n);
  for (int e : tree) {
    auto [u, v] = graph_.edges[e];
    adjacency[u].emplace_back(v, e);
    adjacency[v].emplace_back(u, e);
  }
  std::vector<int> via(graph_.n, -1);  // edge used to reach each vertex
  std::vector<char> seen(graph_.n, 0);
  std::vector<int> stack{a};
  seen[a] = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    if (x == b) break;
    for (auto [y, e] : adjacency[x]) {
      if (seen[y]) continue;
      seen[y] = 1;
      via[y] = e;
      stack.push_back(y);
    }
  }
  std::vector<int> path;
  for (int x = b; x != a;) {
    const int e = via[x];
    path.push_back(e);
    auto [u, v] = graph_.edges[e];
    x = u == x ? v : u;
  }
  return path;
}

Oracle::Vertex Oracle::complement(const Vertex& tree) const {
  Vertex out;
  out.reserve(non_tree_count_);
  std::size_t t = 0;
  for (int e = 0; e < static_cast<int>(graph_.edges.size()); ++e) {
    if (t < tree.size() && tree[t] == e) {
      ++t;
      continue;
    }
    out.push_back(e);
  }
  return out;
}

std::optional<Oracle::Vertex> Oracle::adj(const Vertex& tree, std::size_t j) const {
  if (j < 1 || j > degree_) return std::nullopt;
  const std::size_t index = j - 1;
  const int removed = tree[index / non_tree_count_];
  const int added = complement(tree)[index % non_tree_count_];
  const auto path = tree_path(tree, graph_.edges[added].first, graph_.edges[added].second);
  if (std::find(path.begin(), path.end(), removed) == path.end()) return std::nullopt;
  Vertex next;
  next.reserve(tree.size());
  for (int e : tree)
    if (e != removed) next.push_back(e);
  next.insert(std::upper_bound(next.begin(), next.end(), added), added);
  return next;
}

std::pair<Oracle::Vertex, std::size_t> Oracle::local_search(const Vertex& tree) const {
  // Least root edge absent from the tree.
  int entering = -1;
  for (int e : root_) {
    if (!std::binary_search(tree.begin(), tree.end(), e)) {
      entering = e;
      break;
    }
  }
  if (entering < 0) return {tree, 0};

  const auto cycle = tree_path(tree, graph_.edges[entering].first, graph_.edges[entering].second);
  const int leaving = *std::max_element(cycle.begin(), cycle.end());

  Vertex parent;
  parent.reserve(tree.size());
  for (int e : tree)
    if (e != leaving) parent.push_back(e);
  parent.insert(std::upper_bound(parent.begin(), parent.end(), entering), entering);

  // adj(parent, j) must remove `entering` and add back `leaving`.
  const auto out_pos = static_cast<std::size_t>(
      std::lower_bound(parent.begin(), parent.end(), entering) - parent.begin());
  const auto rest = complement(parent);
  const auto in_pos =
      static_cast<std::size_t>(std::lower_bound(rest.begin(), rest.end(), leaving) - rest.begin());
  return {std::move(parent), out_pos * non_tree_count_ + in_pos + 1};
}

bool Oracle::is_spanning_tree(const Vertex& tree) const {
  if (static_cast<int>(tree.size()) != graph_.n - 1) return false;
  if (!std::is_sorted(tree.begin(), tree.end()) ||
      std::adjacent_find(tree.begin(), tree.end()) != tree.end())
    return false;
  DisjointSets sets(graph_.n);
  for (int e : tree) {
    if (e < 0 || e >= static_cast<int>(graph_.edges.size())) return false;
    if (!sets.unite(graph_.edges[e].first, graph_.edges[e].second)) return false;
  }
  return true;
}

std::string encode_vertex(const Oracle::Vertex& tree) {
  ByteWriter out;
  for (int e : tree) out.put_u32(static_cast<std::uint32_t>(e));
  return std::move(out).bytes();
}

Oracle::Vertex decode_vertex(const Oracle& oracle, std::string_view payload) {
  const std::size_t expected = 4 * static_cast<std::size_t>(oracle.graph().n - 1);
  if (payload.size() != expected)
    throw InputError("spantree node has " + std::to_string(payload.size()) + " bytes, expected " +
                     std::to_string(expected));
  ByteReader in(payload);
  Oracle::Vertex tree(oracle.graph().n - 1);
  for (auto& e : tree) e = static_cast<int>(in.get_u32());
  if (!oracle.is_spanning_tree(tree)) throw InputError("spantree node is not a spanning tree");
  return tree;
}

ApplicationDescriptor Application::descriptor() const {
  return {"spantree", false, {BudgetKind::nodes}, true};
}

JobNode Application::init(std::string_view input) {
  oracle_.emplace(parse_graph(input));
  return {encode_vertex(oracle_->root()), 0};
}

std::string Application::format(const Oracle::Vertex& tree) {
  std::string line;
  for (int e : tree) {
    if (!line.empty()) line += ' ';
    line += std::to_string(e + 1);
  }
  return line;
}

SearchResult Application::search(const JobNode& node, const Budget& budget,
                                 const SearchContext& context) const {
  const Oracle& oracle = *oracle_;
  const Oracle::Vertex start = decode_vertex(oracle, node.payload);
  return rs::run_job(
      oracle, start, start == oracle.root(), budget, context, options_.prune,
      [](const Oracle::Vertex& v) { return format(v); },
      [](const Oracle::Vertex& v) { return encode_vertex(v); });
}

void Application::validate_node(std::string_view payload) const { decode_vertex(*oracle_, payload); }

}  // namespace mts::spantree
