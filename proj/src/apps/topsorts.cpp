#include "mts/apps/topsorts.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "../text_input.hpp"
#include "mts/codec.hpp"
#include "mts/error.hpp"
#include "mts/reverse_search_job.hpp"

namespace mts::topsorts {

Poset parse_poset(std::string_view text) {
  detail::TokenStream in(text);
  if (in.done()) throw InputError(1, "empty input");
  Poset poset;
  const std::size_t header_line = in.line();
  poset.n = in.next_int<int>("element count");
  const int m = in.next_int<int>("relation count");
  if (poset.n < 1 || poset.n > 65535) throw InputError(header_line, "element count must be in 1..65535");
  if (m < 0) throw InputError(header_line, "relation count must be nonnegative");
  for (int i = 0; i < m; ++i) {
    const std::size_t line = in.line();
    const int a = in.next_int<int>("relation source");
    const int b = in.next_int<int>("relation target");
    if (a < 1 || a > poset.n || b < 1 || b > poset.n) throw InputError(line, "element out of range");
    if (a == b) throw InputError(line, "element related to itself");
    poset.relations.emplace_back(a - 1, b - 1);
  }
  in.expect_done();
  if (static_cast<int>(greedy_extension(poset).size()) != poset.n)
    throw InputError("relations contain a cycle");
  return poset;
}

std::vector<int> greedy_extension(const Poset& poset) {
  std::vector<std::vector<int>> succ(poset.n);
  std::vector<int> indegree(poset.n, 0);
  for (auto [a, b] : poset.relations) {
    succ[a].push_back(b);
    ++indegree[b];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> available;
  for (int i = 0; i < poset.n; ++i)
    if (indegree[i] == 0) available.push(i);
  std::vector<int> order;
  while (!available.empty()) {
    const int x = available.top();
    available.pop();
    order.push_back(x);
    for (int y : succ[x])
      if (--indegree[y] == 0) available.push(y);
  }
  return order;  // shorter than n when there is a cycle
}

Oracle::Oracle(const Poset& poset) : n_(poset.n), before_(static_cast<std::size_t>(n_) * n_, 0) {
  label_to_element_ = greedy_extension(poset);
  if (static_cast<int>(label_to_element_.size()) != n_) throw InputError("relations contain a cycle");
  std::vector<int> element_to_label(n_);
  for (int label = 0; label < n_; ++label) element_to_label[label_to_element_[label]] = label;
  for (auto [a, b] : poset.relations) before_[element_to_label[a] * n_ + element_to_label[b]] = 1;
}

std::optional<Oracle::Vertex> Oracle::adj(const Vertex& v, std::size_t j) const {
  if (j < 1 || j >= v.size()) return std::nullopt;
  if (precedes(v[j - 1], v[j])) return std::nullopt;
  Vertex w = v;
  std::swap(w[j - 1], w[j]);
  return w;
}

std::pair<Oracle::Vertex, std::size_t> Oracle::local_search(const Vertex& v) const {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] > v[i + 1]) {
      Vertex u = v;
      std::swap(u[i], u[i + 1]);
      return {std::move(u), i + 1};
    }
  }
  return {v, 0};  // root
}

Oracle::Vertex Oracle::root() const {
  Vertex v(n_);
  for (int i = 0; i < n_; ++i) v[i] = i;
  return v;
}

bool Oracle::is_root(const Vertex& v) const {
  for (int i = 0; i < n_; ++i)
    if (v[i] != i) return false;
  return true;
}

std::vector<int> Oracle::to_elements(const Vertex& v) const {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = label_to_element_[v[i]];
  return out;
}

bool Oracle::is_extension(const Vertex& v) const {
  if (static_cast<int>(v.size()) != n_) return false;
  std::vector<int> position(n_, -1);
  for (int i = 0; i < n_; ++i) {
    if (v[i] < 0 || v[i] >= n_ || position[v[i]] != -1) return false;
    position[v[i]] = i;
  }
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (precedes(a, b) && position[a] > position[b]) return false;
  return true;
}

std::string encode_vertex(const Oracle::Vertex& v) {
  ByteWriter out;
  for (int label : v) out.put_u16(static_cast<std::uint16_t>(label));
  return std::move(out).bytes();
}

Oracle::Vertex decode_vertex(const Oracle& oracle, std::string_view payload) {
  if (payload.size() != 2 * static_cast<std::size_t>(oracle.size()))
    throw InputError("topsorts node has " + std::to_string(payload.size()) + " bytes, expected " +
                     std::to_string(2 * oracle.size()));
  ByteReader in(payload);
  Oracle::Vertex v(oracle.size());
  for (auto& label : v) label = in.get_u16();
  if (!oracle.is_extension(v)) throw InputError("topsorts node is not a linear extension");
  return v;
}

ApplicationDescriptor Application::descriptor() const {
  return {"topsorts", false, {BudgetKind::nodes}, true};
}

JobNode Application::init(std::string_view input) {
  oracle_.emplace(parse_poset(input));
  return {encode_vertex(oracle_->root()), 0};
}

std::string Application::format(const Oracle::Vertex& v) const {
  std::string line;
  for (int element : oracle_->to_elements(v)) {
    if (!line.empty()) line += ' ';
    line += std::to_string(element + 1);
  }
  return line;
}

SearchResult Application::search(const JobNode& node, const Budget& budget,
                                  const SearchContext& context) const {
  const Oracle& oracle = *oracle_;
  const Oracle::Vertex start = decode_vertex(oracle, node.payload);
  return rs::run_job(
      oracle, start, oracle.is_root(start), budget, context, options_.prune,
      [this](const Oracle::Vertex& v) { return format(v); },
      [](const Oracle::Vertex& v) { return encode_vertex(v); });
}

void Application::validate_node(std::string_view payload) const { decode_vertex(*oracle_, payload); }

}  // namespace mts::topsorts
