#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mts/search_api.hpp"

namespace mts {

// Pending jobs held by the master, served first-in first-out.
class JobList {
 public:
  void push(JobNode node) { entries_.push_back(std::move(node)); }
  void append(std::vector<JobNode> nodes);
  // Precondition: !empty().
  JobNode pop_next();

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::deque<JobNode>& entries() const { return entries_; }

 private:
  std::deque<JobNode> entries_;
};

// Master-side table of shared tokens. Each distinct token gets the next
// sequence number; every worker receives each token at most once.
class SharedStore {
 public:
  struct Item {
    std::uint64_t seq;
    std::string token;
  };

  // Adds tokens not already present. Returns how many were new.
  std::size_t merge(std::span<const std::string> tokens);

  // Tokens with a sequence number above the worker's high-water mark, in
  // sequence order. Advances the mark to the newest item.
  std::vector<std::string> take_undelivered(int worker);

  std::uint64_t high_water(int worker) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Item>& items() const { return items_; }
  std::vector<std::string> tokens() const;

 private:
  std::vector<Item> items_;
  std::set<std::string, std::less<>> present_;
  std::map<int, std::uint64_t> delivered_;
  std::uint64_t last_seq_ = 0;
};

}  // namespace mts
