#include <doctest.h>

#include <sstream>

#include "smh/error.hpp"
#include "smh/exact.hpp"
#include "support.hpp"

using namespace smh;
using namespace smh::testing;

namespace {

SteinerSolution dp(const SteinerInstance& inst, TieBreak tie = TieBreak::kLowestId, Vertex anchor = kNoVertex) {
  return solve_with_decomposition(inst, tie, anchor);
}

// 4-cycle 0-1-2-3-0 with the heavy edge between 3 and 0.
SteinerInstance heavy_cycle() {
  const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 10}});
  return SteinerInstance(g, {0, 3});
}

}  // namespace

TEST_CASE("bell numbers and the state bound") {
  CHECK(bell_number(0) == 1);
  CHECK(bell_number(1) == 1);
  CHECK(bell_number(3) == 5);
  CHECK(bell_number(5) == 52);
  CHECK(bell_number(10) == 115975);
  CHECK(state_bound(2) == 5);  // {}, {a}, {b}, {a|b}, {ab}
}

TEST_CASE("brute-force oracle agrees with hand values") {
  CHECK(brute_force_steiner(heavy_cycle()) == 3);
}

TEST_CASE("dreyfus_wagner examples") {
  SUBCASE("two terminals give the shortest path") {
    Rng rng(2);
    for (int i = 0; i < 20; ++i) {
      const auto inst = random_instance(rng, 20, 45, 2);
      const auto t = dreyfus_wagner(inst);
      const auto spt = shortest_paths(inst.graph(), inst.terminals()[0]);
      CHECK(t.weight == spt.distance[static_cast<std::size_t>(inst.terminals()[1])]);
      CHECK(validate_solution(inst, t).empty());
    }
  }
  SUBCASE("star with three terminal leaves") {
    const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 3}, {0, 2, 5}, {0, 3, 7}});
    const SteinerInstance inst(g, {1, 2, 3});
    const auto t = dreyfus_wagner(inst);
    CHECK(t.weight == 15);
    CHECK(t.edges.size() == 3);
  }
  SUBCASE("4-cycle takes the long way round") {
    const auto t = dreyfus_wagner(heavy_cycle());
    CHECK(t.weight == 3);
    CHECK(t.edges.size() == 3);
  }
  SUBCASE("one terminal") {
    const SteinerInstance inst(path_graph(3), {1});
    CHECK(dreyfus_wagner(inst).edges.empty());
  }
  SUBCASE("refuses above the cap") {
    Rng rng(1);
    const auto inst = random_instance(rng, 20, 40, 13);
    CHECK_THROWS_AS(dreyfus_wagner(inst), RefusedError);
    CHECK_NOTHROW(dreyfus_wagner(inst, 13));
  }
}

TEST_CASE("dreyfus_wagner matches edge-subset enumeration") {
  Rng rng(13);
  for (int i = 0; i < 60; ++i) {
    const auto n = static_cast<Vertex>(4 + rng.below(5));
    const auto inst = random_instance(rng, n, static_cast<std::size_t>(n) + rng.below(8), 1 + rng.below(4), 1, 20);
    CHECK(dreyfus_wagner(inst).weight == brute_force_steiner(inst));
  }
}

TEST_CASE("dp_solve examples") {
  SUBCASE("single terminal") {
    Rng rng(3);
    const auto inst = random_instance(rng, 12, 20, 1);
    const auto t = dp(inst);
    CHECK(t.edges.empty());
    CHECK(t.weight == 0);
  }
  SUBCASE("two terminals give the shortest path") {
    Rng rng(4);
    for (int i = 0; i < 30; ++i) {
      const auto inst = random_instance(rng, 18, 35, 2);
      const auto spt = shortest_paths(inst.graph(), inst.terminals()[0]);
      CHECK(dp(inst).weight == spt.distance[static_cast<std::size_t>(inst.terminals()[1])]);
    }
  }
  SUBCASE("heavy cycle") { CHECK(dp(heavy_cycle()).weight == 3); }
  SUBCASE("anchor must be a terminal") {
    const auto inst = heavy_cycle();
    const auto td = decomposition_from_order(inst.graph(), greedy_degree(inst.graph()));
    CHECK_THROWS_AS(dp_solve(inst, make_nice(inst.graph(), td, 1)), InconsistencyError);
  }
  SUBCASE("zero-weight edges") {
    const auto g = WeightedGraph::complete_vertex_set(4, {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {0, 3, 0}, {0, 2, 5}});
    const SteinerInstance inst(g, {0, 2, 3});
    const auto t = dp(inst);
    CHECK(t.weight == 0);
    CHECK(validate_solution(inst, t).empty());
  }
}

TEST_CASE("dp_solve matches dreyfus_wagner on random instances") {
  Rng rng(2024);
  for (int i = 0; i < 150; ++i) {
    const auto n = static_cast<Vertex>(5 + rng.below(21));
    const std::size_t max_m = std::min<std::size_t>(60, static_cast<std::size_t>(n) * (n - 1) / 2);
    const std::size_t m = static_cast<std::size_t>(n - 1) + rng.below(max_m - static_cast<std::size_t>(n) + 2);
    const auto inst = random_instance(rng, n, m, 1 + rng.below(6));
    const auto expect = dreyfus_wagner(inst).weight;
    const auto t = dp(inst);
    CHECK(t.weight == expect);
    CHECK(validate_solution(inst, t).empty());
  }
}

TEST_CASE("dp_solve is invariant under anchor and tie rule") {
  Rng rng(55);
  for (int i = 0; i < 25; ++i) {
    const auto inst = random_instance(rng, 20, 40, 4);
    const auto a = dp(inst, TieBreak::kLowestId, inst.terminals().front()).weight;
    CHECK(dp(inst, TieBreak::kHighestId, inst.terminals().front()).weight == a);
    CHECK(dp(inst, TieBreak::kLowestId, inst.terminals().back()).weight == a);
  }
}

TEST_CASE("dp_solve on subgraphs of a larger id space") {
  // Only part of the host id space is present; ids stay host ids.
  const auto g = WeightedGraph(10, {2, 5, 7, 9}, {{2, 5, 1}, {5, 7, 2}, {7, 9, 3}, {2, 9, 10}});
  const SteinerInstance inst(g, {2, 9});
  const auto t = dp(inst);
  CHECK(t.weight == 6);
  CHECK(validate_solution(inst, t).empty());
}

TEST_CASE("dp_solve reports capacity") {
  const SteinerInstance clique(complete_graph(12), {0, 5, 11});
  DpOptions tight;
  tight.max_entries = 1000;
  CHECK_THROWS_AS(solve_with_decomposition(clique, TieBreak::kLowestId, kNoVertex, tight), CapacityError);

  const SteinerInstance huge(complete_graph(17), {0, 1});
  CHECK_THROWS_AS(solve_with_decomposition(huge), CapacityError);
}

TEST_CASE("dp statistics respect the subset-partition bound") {
  Rng rng(6);
  const auto inst = random_instance(rng, 25, 55, 5);
  const auto& g = inst.graph();
  const auto nice = make_nice(g, decomposition_from_order(g, greedy_degree(g)), inst.terminals().front());
  DpStats stats;
  dp_solve(inst, nice, {}, &stats);
  REQUIRE(stats.table_sizes.size() == nice.nodes.size());
  for (std::size_t i = 0; i < nice.nodes.size(); ++i) {
    CHECK(stats.table_sizes[i] <= state_bound(static_cast<int>(nice.nodes[i].bag.size())));
  }
  std::ostringstream csv;
  stats.write_csv(csv, nice);
  CHECK(csv.str().rfind("node,kind,bag_size,entries\n", 0) == 0);
}

TEST_CASE("dp_solve with an upper bound stays exact") {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const auto inst = random_instance(rng, 20, 30 + rng.below(12), 2 + rng.below(5));
    const auto opt = dreyfus_wagner(inst).weight;
    for (Weight slack : {Weight{0}, Weight{1}, Weight{50}}) {
      DpOptions bounded;
      bounded.upper_bound = opt + slack;
      const auto t = solve_with_decomposition(inst, TieBreak::kLowestId, kNoVertex, bounded);
      CHECK(t.weight == opt);
      CHECK(validate_solution(inst, t).empty());
    }
    if (opt > 0) {
      DpOptions too_low;
      too_low.upper_bound = opt - 1;
      CHECK_THROWS_AS(solve_with_decomposition(inst, TieBreak::kLowestId, kNoVertex, too_low), InfeasibleError);
    }
  }
}

TEST_CASE("upper bound shrinks the tables") {
  Rng rng(78);
  const auto inst = random_instance(rng, 25, 40, 6);
  const auto& g = inst.graph();
  const auto nice = make_nice(g, decomposition_from_order(g, greedy_degree(g)), inst.terminals().front());
  DpStats loose;
  DpStats tight;
  dp_solve(inst, nice, {}, &loose);
  DpOptions bounded;
  bounded.upper_bound = dreyfus_wagner(inst).weight;
  dp_solve(inst, nice, bounded, &tight);
  CHECK(tight.total_entries < loose.total_entries);
}
