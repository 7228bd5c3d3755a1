#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "ruc/instance.hpp"
#include "ruc/scenario_tree.hpp"

using namespace ruc;

#ifndef RUC_DATA_DIR
#define RUC_DATA_DIR "data"
#endif

static Instance paper() { return load_instance(std::string(RUC_DATA_DIR) + "/kazarlis10.json"); }

TEST_CASE("paper tree has 90 nodes and 8 leaves") {
  ScenarioTree tree = build_tree(paper(), 0.1);
  CHECK(tree.size() == 90);  // 6*1 + 6*2 + 6*4 + 6*8
  CHECK(tree.leaves().size() == 8);
  CHECK(tree.horizon() == 24);
  for (int l : tree.leaves()) CHECK(tree.node(l).path_prob == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("scenario-1 path sees the low multiplier at t=7") {
  ScenarioTree tree = build_tree(paper(), 0.1);
  auto paths = enumerate_paths(tree);
  REQUIRE(paths.size() == 8);
  // scenario 1 = all-low; node at period 7 on that path
  int n7 = paths[0].nodes[6];
  CHECK(tree.node(n7).period == 7);
  CHECK(tree.node(n7).demand == doctest::Approx(0.9 * 1150));  // 1035 MW
  // scenario 8 = all-high
  int n7h = paths[7].nodes[6];
  CHECK(tree.node(n7h).demand == doctest::Approx(1.1 * 1150));
}

TEST_CASE("epsilon = 0 degenerates demands but keeps the structure") {
  ScenarioTree tree = build_tree(paper(), 0.0);
  CHECK(tree.size() == 90);
  CHECK(tree.leaves().size() == 8);
  for (const auto& n : tree.nodes())
    if (n.parent >= 0)
      for (int sib : tree.node(n.parent).children)
        CHECK(tree.node(sib).demand == doctest::Approx(n.demand));
}

TEST_CASE("enumerate_paths: one path per leaf, full length, probabilities sum to 1") {
  ScenarioTree tree = build_tree(paper(), 0.25);
  auto paths = enumerate_paths(tree);
  REQUIRE(paths.size() == 8);
  double total = 0.0;
  for (const auto& p : paths) {
    CHECK(p.nodes.size() == 24);
    CHECK(tree.node(p.nodes.front()).period == 1);
    CHECK(tree.node(p.nodes.back()).period == 24);
    total += p.prob;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-scenario tree has one certain path") {
  Instance inst = paper();
  inst.scenario.branch_periods.clear();
  ScenarioTree tree = build_tree(inst, 0.3);
  CHECK(tree.size() == 24);
  auto paths = enumerate_paths(tree);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].prob == doctest::Approx(1.0));
}

TEST_CASE("total demand random variable") {
  Instance inst = paper();
  SUBCASE("epsilon 0: every leaf totals the base sum") {
    auto totals = total_demand_random_variable(build_tree(inst, 0.0));
    for (double d : totals) CHECK(d == doctest::Approx(27100.0));
  }
  SUBCASE("epsilon 0.1: all-high leaf and symmetric pair") {
    auto totals = total_demand_random_variable(build_tree(inst, 0.1));
    REQUIRE(totals.size() == 8);
    CHECK(totals.back() == doctest::Approx(5350 + 1.1 * 21750));  // 29275
    CHECK(0.5 * (totals.front() + totals.back()) == doctest::Approx(27100.0));
  }
}

TEST_CASE("path probability is the product of conditional probabilities") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ScenarioTree tree = ruc::testing::random_tree(rng, 5, 3, 1.0, 10.0);
    for (const auto& n : tree.nodes()) {
      double prod = 1.0;
      for (int id = n.id; id != -1; id = tree.node(id).parent) prod *= tree.node(id).cond_prob;
      CHECK(n.path_prob == doctest::Approx(prod).epsilon(1e-12));
    }
  }
}

TEST_CASE("node count matches the per-block formula for arbitrary branch schedules") {
  std::mt19937_64 rng(11);
  Instance inst = paper();
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<int> bps;
    for (int t = 2; t <= 24; ++t)
      if (rng() % 5 == 0) bps.push_back(t);
    inst.scenario.branch_periods = bps;
    ScenarioTree tree = build_tree(inst, 0.2);
    // expected: sum over blocks of (block length * branch count at block start)
    long expected = 0, branches = 1;
    std::vector<int> starts = {1};
    for (int bp : bps) starts.push_back(bp);
    starts.push_back(25);
    for (size_t k = 0; k + 1 < starts.size(); ++k) {
      if (k > 0) branches *= 2;
      expected += (starts[k + 1] - starts[k]) * branches;
    }
    CHECK(tree.size() == expected);
    CHECK(static_cast<long>(tree.leaves().size()) == branches);
  }
}

TEST_CASE("strictly positive demands for epsilon < 1, rejection at 1") {
  Instance inst = paper();
  ScenarioTree tree = build_tree(inst, 0.999);
  for (const auto& n : tree.nodes()) CHECK(n.demand > 0.0);
  CHECK_THROWS_AS(build_tree(inst, 1.0), ValidationError);
  CHECK_THROWS_AS(build_tree(inst, -0.1), ValidationError);
}

TEST_CASE("asymmetric branch probabilities propagate to path probabilities") {
  Instance inst = paper();
  inst.scenario.branch_probs = {0.3, 0.7};
  ScenarioTree tree = build_tree(inst, 0.2);
  double total = 0.0;
  for (int l : tree.leaves()) total += tree.node(l).path_prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // all-low scenario: 0.3^3; all-high: 0.7^3
  CHECK(tree.node(tree.leaves().front()).path_prob == doctest::Approx(0.027));
  CHECK(tree.node(tree.leaves().back()).path_prob == doctest::Approx(0.343));
}

TEST_CASE("debug dump has one tab-separated line per node") {
  ScenarioTree tree = build_tree(paper(), 0.1);
  std::string dump = dump_tree(tree);
  size_t lines = std::count(dump.begin(), dump.end(), '\n');
  CHECK(lines == 90);
  CHECK(dump.rfind("0\t1\t-1\t", 0) == 0);  // root line first
}
