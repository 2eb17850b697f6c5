#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mts/reverse_search.hpp"
#include "mts/search_api.hpp"

namespace mts::topsorts {

// Partial order on elements 0..n-1 given by covering pairs (a before b).
struct Poset {
  int n = 0;
  std::vector<std::pair<int, int>> relations;
};

// Text format: "n m" followed by m pairs "a b" (1-based, a precedes b).
// Throws InputError (with line) on malformed input or a cycle.
Poset parse_poset(std::string_view text);

// Linear extension that always places the smallest available element next.
std::vector<int> greedy_extension(const Poset& poset);

// Reverse search over linear extensions. Elements are relabelled by their
// position in the greedy extension, so the root is the identity and every
// relation goes from a smaller to a larger label. Neighbours swap two
// adjacent elements; f swaps back the first descent.
class Oracle {
 public:
  using Vertex = std::vector<int>;

  explicit Oracle(const Poset& poset);

  std::size_t max_degree() const { return n_ > 1 ? static_cast<std::size_t>(n_ - 1) : 0; }
  std::optional<Vertex> adj(const Vertex& v, std::size_t j) const;
  std::pair<Vertex, std::size_t> local_search(const Vertex& v) const;

  Vertex root() const;
  bool is_root(const Vertex& v) const;
  // Labels in linear order -> original element ids (0-based).
  std::vector<int> to_elements(const Vertex& v) const;
  bool precedes(int label_a, int label_b) const { return before_[label_a * n_ + label_b] != 0; }
  int size() const { return n_; }
  bool is_extension(const Vertex& v) const;

 private:
  int n_ = 0;
  std::vector<char> before_;  // n*n, direct relations in label space
  std::vector<int> label_to_element_;
};

std::string encode_vertex(const Oracle::Vertex& v);
// Throws InputError on size mismatch or if the payload is not a linear
// extension of the oracle's poset.
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
  std::string format(const Oracle::Vertex& v) const;

 private:
  Options options_;
  std::optional<Oracle> oracle_;
};

}  // namespace mts::topsorts
