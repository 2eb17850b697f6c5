#include "doctest.h"
#include "mts/job_list.hpp"

using namespace mts;

TEST_CASE("job list is first in first out") {
  JobList jobs;
  jobs.push({"a"});
  jobs.append({{"b"}, {"c"}});
  CHECK(jobs.size() == 3);
  CHECK(jobs.pop_next().payload == "a");
  CHECK(jobs.pop_next().payload == "b");
  jobs.push({"d"});
  CHECK(jobs.pop_next().payload == "c");
  CHECK(jobs.pop_next().payload == "d");
  CHECK(jobs.empty());
}

TEST_CASE("shared store delivers each token once per worker") {
  SharedStore store;
  std::vector<std::string> first{"1", "2", "3"};
  CHECK(store.merge(first) == 3);
  CHECK(store.take_undelivered(0) == first);
  CHECK(store.high_water(0) == 3);

  std::vector<std::string> more{"3", "4", "5"};
  CHECK(store.merge(more) == 2);
  CHECK(store.take_undelivered(0) == std::vector<std::string>{"4", "5"});
  CHECK(store.take_undelivered(0).empty());
  CHECK(store.take_undelivered(1).size() == 5);
  CHECK(store.tokens() == std::vector<std::string>{"1", "2", "3", "4", "5"});
}
