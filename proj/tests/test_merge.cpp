#include <doctest.h>

#include "smh/error.hpp"
#include "smh/exact.hpp"
#include "smh/merge.hpp"
#include "support.hpp"

using namespace smh;
using namespace smh::testing;

namespace {

SolutionPool pool_of(std::vector<SteinerSolution> trees) {
  SolutionPool pool;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    pool.solutions.push_back(std::move(trees[i]));
    pool.provenance.push_back({static_cast<int>(i), 0, 0});
  }
  return pool;
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

// Terminals 0,1,2. Each tree takes one cheap direct edge and one expensive
// detour; together they hold both cheap edges.
struct Crossed {
  SteinerInstance instance;
  SolutionPool pool;
};

Crossed crossed() {
  const auto g = WeightedGraph::complete_vertex_set(
      5, {{0, 1, 1}, {0, 3, 5}, {1, 3, 5}, {1, 2, 1}, {1, 4, 5}, {2, 4, 5}});
  SteinerInstance inst(g, {0, 1, 2});
  auto a = prune(inst, std::vector<Edge>{{0, 1, 1}, {1, 4, 5}, {2, 4, 5}});
  auto b = prune(inst, std::vector<Edge>{{0, 3, 5}, {1, 3, 5}, {1, 2, 1}});
  return {inst, pool_of({a, b})};
}

SolutionPool generated(const SteinerInstance& inst, std::uint64_t seed, int size = 8) {
  GeneratorConfig cfg;
  cfg.pool_size = size;
  cfg.iterations_per_run = 2;
  cfg.seed = seed;
  return generate_pool(inst, cfg);
}

}  // namespace

TEST_CASE("greedy_steiner_union examples") {
  SUBCASE("identical trees are all accepted") {
    const SteinerInstance inst(path_graph(5), {0, 4});
    const auto tree = prune(inst, inst.graph().edges());
    const auto pool = pool_of({tree, tree, tree});
    const auto sel = greedy_steiner_union(inst, pool, identity(3), 2);
    CHECK(sel.selected == std::vector<std::size_t>{0, 1, 2});
    CHECK(sel.graph == tree.as_graph(inst));
    CHECK(sel.order.width == 1);
  }
  SUBCASE("two edge-disjoint spanning trees of K4") {
    const auto k4 = complete_graph(4);
    const SteinerInstance inst(k4, {0, 1, 2, 3});
    const auto a = prune(inst, std::vector<Edge>{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
    const auto b = prune(inst, std::vector<Edge>{{1, 3, 1}, {0, 3, 1}, {0, 2, 1}});
    const auto pool = pool_of({a, b});
    CHECK(greedy_steiner_union(inst, pool, identity(2), 2).selected == std::vector<std::size_t>{0});
    const auto wide = greedy_steiner_union(inst, pool, identity(2), 3);
    CHECK(wide.selected.size() == 2);
    CHECK(wide.graph == k4);
    CHECK(wide.order.width == 3);
  }
  SUBCASE("order decides which trees fit") {
    const auto [inst, pool] = crossed();
    const std::vector<std::size_t> reversed{1, 0};
    CHECK(greedy_steiner_union(inst, pool, reversed, 1).selected == std::vector<std::size_t>{1});
    CHECK(greedy_steiner_union(inst, pool, reversed, 2).selected == reversed);
  }
}

TEST_CASE("greedy union matches graph_union and decomposes validly") {
  Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const auto inst = random_instance(rng, 40, 70, 6);
    const auto pool = generated(inst, static_cast<std::uint64_t>(i));
    auto order = identity(pool.size());
    rng.shuffle(order);
    const int cap = 2 + static_cast<int>(rng.below(4));
    const auto sel = greedy_steiner_union(inst, pool, order, cap);
    std::vector<WeightedGraph> parts;
    for (std::size_t k : sel.selected) parts.push_back(pool.solutions[k].as_graph(inst));
    CHECK(sel.graph == graph_union(parts));
    CHECK(sel.order.width <= cap);
    CHECK(validate(sel.graph, decomposition_from_order(sel.graph, sel.order)).empty());
    // Maximal: every rejected tree breaks the cap when added to the final union.
    for (std::size_t k : order) {
      if (std::find(sel.selected.begin(), sel.selected.end(), k) != sel.selected.end()) continue;
      auto with = parts;
      with.push_back(pool.solutions[k].as_graph(inst));
      CHECK_FALSE(greedy_degree_width_max_m(graph_union(with), cap).within);
    }
  }
}

TEST_CASE("Mean compares exactly") {
  CHECK(Mean{13, 2} < Mean{7, 1});
  CHECK(Mean{2, 4} == Mean{1, 2});
  CHECK(Mean{1, 3} < Mean{1, 2});
  CHECK(Mean{13, 2}.value() == doctest::Approx(6.5));
}

TEST_CASE("ranking_procedure") {
  SUBCASE("no rounds leaves f unchanged") {
    const auto [inst, pool] = crossed();
    MergeConfig cfg;
    cfg.rank_iterations = 0;
    const auto state = ranking_procedure(inst, pool, cfg);
    CHECK(state.adjusted[0] == Mean{11, 1});
    CHECK(state.adjusted[1] == Mean{11, 1});
    CHECK_FALSE(state.incumbent);
  }
  SUBCASE("a better union lowers both adjusted values") {
    const auto [inst, pool] = crossed();
    MergeConfig cfg;
    cfg.rank_iterations = 1;
    const auto state = ranking_procedure(inst, pool, cfg);
    REQUIRE(state.log.size() == 1);
    CHECK(state.log[0].value == 2);
    CHECK(state.z[0] == std::vector<Weight>{11, 2});
    CHECK(state.adjusted[0] == Mean{13, 2});
    CHECK(state.adjusted[0] < Mean{11, 1});
    REQUIRE(state.incumbent);
    CHECK(state.incumbent->weight == 2);
  }
  SUBCASE("value lists follow the log on random instances") {
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
      const auto inst = random_instance(rng, 35, 60, 5);
      const auto pool = generated(inst, static_cast<std::uint64_t>(i));
      MergeConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(i);
      const auto state = ranking_procedure(inst, pool, cfg);
      REQUIRE(state.log.size() == 20);
      for (std::size_t t = 0; t < pool.size(); ++t) {
        std::vector<Weight> expect{pool.solutions[t].weight};
        for (const auto& round : state.log) {
          if (round.value && std::count(round.selected.begin(), round.selected.end(), t)) {
            expect.push_back(*round.value);
          }
        }
        CHECK(state.z[t] == expect);
        CHECK(state.z[t].size() >= 1);
        CHECK(state.z[t].size() <= 21);
      }
      cfg.threads = 3;
      const auto parallel = ranking_procedure(inst, pool, cfg);
      CHECK(parallel.z == state.z);
    }
  }
  SUBCASE("over-budget rounds are skipped") {
    Rng rng(12);
    const auto inst = random_instance(rng, 30, 80, 5);
    const auto pool = generated(inst, 1);
    MergeConfig cfg;
    cfg.rank_iterations = 4;
    cfg.dp.max_entries = 1;
    const auto state = ranking_procedure(inst, pool, cfg);
    for (const auto& round : state.log) {
      CHECK_FALSE(round.value);
      CHECK_FALSE(round.skipped.empty());
    }
    for (std::size_t t = 0; t < pool.size(); ++t) CHECK(state.z[t].size() == 1);
  }
}

TEST_CASE("ranked_order breaks ties by weight then index") {
  SteinerSolution heavy{{}, 9};
  SteinerSolution light{{}, 5};
  const auto pool = pool_of({heavy, light, light, heavy});
  const std::vector<Mean> adjusted{{4, 1}, {8, 2}, {5, 1}, {3, 1}};
  CHECK(ranked_order(pool, adjusted) == std::vector<std::size_t>{3, 1, 0, 2});
}

TEST_CASE("run_smh examples") {
  SUBCASE("pool of one tree") {
    const SteinerInstance inst(path_graph(6), {0, 5});
    const auto tree = prune(inst, inst.graph().edges());
    const auto report = run_smh(inst, pool_of({tree}), {});
    CHECK(report.best == tree);
    CHECK(report.trees_used == std::vector<std::size_t>{0});
  }
  SUBCASE("union covering the graph yields the optimum") {
    Rng rng(13);
    for (int i = 0; i < 10; ++i) {
      const auto n = static_cast<Vertex>(8);
      auto inst = random_instance(rng, n, 13, 1);
      std::vector<Vertex> all(static_cast<std::size_t>(n));
      std::iota(all.begin(), all.end(), 0);
      inst = SteinerInstance(inst.graph(), all);
      // Random spanning trees until every edge is covered.
      std::vector<SteinerSolution> trees;
      std::set<std::pair<Vertex, Vertex>> covered;
      while (covered.size() < inst.graph().edge_count()) {
        auto edges = inst.graph().edges();
        rng.shuffle(edges);
        DisjointSets sets(static_cast<std::size_t>(n));
        std::vector<Edge> kept;
        for (const Edge& e : edges) {
          if (sets.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) kept.push_back(e);
        }
        std::sort(kept.begin(), kept.end());
        Weight w = 0;
        for (const Edge& e : kept) {
          w += e.w;
          covered.insert({e.u, e.v});
        }
        trees.push_back({kept, w});
      }
      const auto pool = pool_of(trees);
      MergeConfig cfg;
      cfg.rank_iterations = 3;
      const auto report = run_smh(inst, pool, cfg);
      REQUIRE(report.final_value);
      if (report.union_edges == inst.graph().edge_count()) {
        CHECK(*report.final_value == dreyfus_wagner(inst).weight);
      }
      CHECK(report.best.weight == dreyfus_wagner(inst).weight);
    }
  }
}

TEST_CASE("run_smh never loses to the pool") {
  Rng rng(14);
  for (int i = 0; i < 15; ++i) {
    const auto inst = random_instance(rng, 50, 80 + rng.below(30), 4 + rng.below(8));
    const auto pool = generated(inst, static_cast<std::uint64_t>(i));
    MergeConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto report = run_smh(inst, pool, cfg);
    CHECK(report.best.weight <= report.pool_best);
    CHECK(validate_solution(inst, report.best).empty());
    CHECK(report.final_width <= cfg.max_width);
    CHECK(std::find(report.trees_used.begin(), report.trees_used.end(), report.order.front()) !=
          report.trees_used.end());
    CHECK(run_smh(inst, pool, cfg).best == report.best);
  }
}

TEST_CASE("run_smh falls back when the final DP is over budget") {
  Rng rng(15);
  const auto inst = random_instance(rng, 30, 80, 5);
  const auto pool = generated(inst, 2);
  MergeConfig cfg;
  cfg.dp.max_entries = 1;
  const auto report = run_smh(inst, pool, cfg);
  CHECK(report.capacity_fallback);
  CHECK(report.degraded());
  CHECK_FALSE(report.final_value);
  CHECK(report.source == ResultSource::kPool);
  CHECK(report.best == pool.solutions[pool.best_index()]);
}

TEST_CASE("merge config checks") {
  const auto [inst, pool] = crossed();
  MergeConfig cfg;
  cfg.rank_width = 11;
  CHECK_THROWS_AS(run_smh(inst, pool, cfg), std::invalid_argument);
  cfg = {};
  cfg.rank_iterations = -1;
  CHECK_THROWS_AS(run_smh(inst, pool, cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_smh(inst, SolutionPool{}, {}), InconsistencyError);
}
