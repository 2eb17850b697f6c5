#include "mts/job_list.hpp"

#include <algorithm>
#include <iterator>

namespace mts {

void JobList::append(std::vector<JobNode> nodes) {
  std::move(nodes.begin(), nodes.end(), std::back_inserter(entries_));
}

JobNode JobList::pop_next() {
  JobNode node = std::move(entries_.front());
  entries_.pop_front();
  return node;
}

std::size_t SharedStore::merge(std::span<const std::string> tokens) {
  std::size_t added = 0;
  for (const auto& token : tokens) {
    if (!present_.insert(token).second) continue;
    items_.push_back({++last_seq_, token});
    ++added;
  }
  return added;
}

std::vector<std::string> SharedStore::take_undelivered(int worker) {
  std::uint64_t& mark = delivered_[worker];
  // Items are stored in sequence order.
  auto first = std::upper_bound(items_.begin(), items_.end(), mark,
                                [](std::uint64_t m, const Item& item) { return m < item.seq; });
  std::vector<std::string> out;
  for (auto it = first; it != items_.end(); ++it) out.push_back(it->token);
  mark = last_seq_;
  return out;
}

std::uint64_t SharedStore::high_water(int worker) const {
  auto it = delivered_.find(worker);
  return it == delivered_.end() ? 0 : it->second;
}

std::vector<std::string> SharedStore::tokens() const {
  std::vector<std::string> out;
  out.reserve(items_.size());
  for (const auto& item : items_) out.push_back(item.token);
  return out;
}

}  // namespace mts
