#include <cmath>

#include "doctest.h"
#include "mts/apps/gwtree.hpp"
#include "mts/error.hpp"

using namespace mts;

TEST_CASE("offspring laws") {
  CHECK(gw::offspring_variance(gw::OffspringLaw::catalan()) == doctest::Approx(0.5));
  CHECK(gw::offspring_variance(gw::OffspringLaw::full_binary()) == doctest::Approx(1.0));
  CHECK(gw::offspring_variance(gw::OffspringLaw::parse("geometric")) == doctest::Approx(2.0));
  CHECK(gw::offspring_variance(gw::OffspringLaw::parse("binomial(4)")) == doctest::Approx(0.75));
  CHECK(gw::offspring_variance(gw::OffspringLaw::parse("uniform(2)")) == doctest::Approx(2.0 / 3.0));
  CHECK(gw::OffspringLaw::catalan().prediction_sigma2() == doctest::Approx(1.5));
  CHECK_THROWS_AS(gw::OffspringLaw::parse("uniform(3)"), UsageError);
  CHECK_THROWS_AS(gw::OffspringLaw::parse("binomial(1)"), UsageError);
  CHECK_THROWS_AS(gw::OffspringLaw::parse("zipf"), UsageError);
}

TEST_CASE("sample means are close to one") {
  std::mt19937_64 rng(7);
  for (const char* name : {"catalan", "fullbinary", "geometric", "poisson", "binomial(3)", "uniform(2)"}) {
    const auto law = gw::OffspringLaw::parse(name);
    double total = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) total += law.sample(rng);
    CHECK(total / n == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("predicted ratios") {
  CHECK(gw::predicted_ratio(1.5, 5000) == doctest::Approx(0.010854).epsilon(1e-3));
  CHECK(gw::predicted_ratio(1.0, 5000) == doctest::Approx(0.008862).epsilon(1e-3));
  CHECK(gw::predicted_ratio(1.5, 10000) / gw::predicted_ratio(1.5, 5000) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("tree from offspring sequence") {
  gw::Tree t({2, 0, 1, 0});
  CHECK(t.size() == 4);
  CHECK(t.child(0, 0) == 1);
  CHECK(t.child(0, 1) == 2);
  CHECK(t.child(2, 0) == 3);
  CHECK(t.parent(3) == 2);
  CHECK(t.sibling_index(2) == 1);
  CHECK_THROWS_AS(gw::Tree({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(gw::Tree({0, 1}), std::invalid_argument);
}

TEST_CASE("sampled trees respect the window and close up") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto t = gw::sample_tree(gw::OffspringLaw::catalan(), 50, 200, rng);
    CHECK(t.size() >= 50);
    CHECK(t.size() <= 200);
    std::uint64_t total = 0;
    for (auto k : t.offspring()) total += k;
    CHECK(total == t.size() - 1);
  }
}

TEST_CASE("full binary tree of size three") {
  std::mt19937_64 rng(1);
  const auto t = gw::sample_tree(gw::OffspringLaw::full_binary(), 3, 3, rng);
  CHECK(t.offspring() == std::vector<std::uint32_t>{2, 0, 0});
}

TEST_CASE("unreachable window gives up") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(gw::sample_tree(gw::OffspringLaw::full_binary(), 2, 2, rng, {1000}), std::runtime_error);
}

TEST_CASE("budgeted run covers the tree") {
  std::mt19937_64 rng(11);
  const auto t = gw::sample_tree(gw::OffspringLaw::catalan(), 2000, 4000, rng);
  for (std::uint64_t b : {1, 10, 100, 100000}) {
    const auto trial = gw::run_budgeted(t, b);
    CHECK(trial.visited == t.size() - 1);
    CHECK(trial.jobs == trial.returned + 1);
  }
}

TEST_CASE("experiment output") {
  gw::Experiment e;
  e.n = 400;
  e.budget = 20;
  e.trials = 3;
  e.threads = 2;
  const auto result = gw::measure_joblist_ratio(e);
  CHECK(result.trials.size() == 3);
  const auto again = gw::measure_joblist_ratio(e);
  CHECK(again.mean_ratio == result.mean_ratio);
  const auto csv = gw::format_csv(e, result);
  CHECK(csv.find("trial,size,b,jobs,ratio,predicted\n") != std::string::npos);
  CHECK(csv.find("generator=mt19937_64") != std::string::npos);
}
