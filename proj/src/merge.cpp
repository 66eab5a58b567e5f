#include "smh/merge.hpp"

#include <algorithm>
#include <atomic>
#include <iterator>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "smh/error.hpp"
#include "smh/nice.hpp"
#include "smh/random.hpp"

namespace smh {

void MergeConfig::check() const {
  if (rank_width < 1) throw std::invalid_argument("rank width must be at least 1");
  if (rank_width > max_width) throw std::invalid_argument("rank width must not exceed the final width");
  if (rank_iterations < 0) throw std::invalid_argument("rank iterations must be nonnegative");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

UnionSelection greedy_steiner_union(const SteinerInstance& instance, const SolutionPool& pool,
                                    std::span<const std::size_t> order, int max_width, TieBreak tie) {
  if (order.empty()) throw InconsistencyError("greedy_steiner_union: empty order");
  const Vertex bound = instance.graph().id_bound();
  UnionSelection out;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Vertex> trial_vertices;
  std::vector<Edge> trial_edges;
  for (std::size_t index : order) {
    const SteinerSolution& tree = pool.solutions.at(index);
    const auto tree_vertices = tree.vertex_set(instance);
    trial_vertices.clear();
    trial_edges.clear();
    std::set_union(vertices.begin(), vertices.end(), tree_vertices.begin(), tree_vertices.end(),
                   std::back_inserter(trial_vertices));
    std::set_union(edges.begin(), edges.end(), tree.edges.begin(), tree.edges.end(), std::back_inserter(trial_edges));
    WeightedGraph trial(bound, trial_vertices, trial_edges);
    auto check = greedy_degree_width_max_m(trial, max_width, tie);
    // A lone tree has width at most 1, so the first one always fits.
    if (!check.within && !out.selected.empty()) continue;
    out.selected.push_back(index);
    out.graph = std::move(trial);
    out.order = check.within ? std::move(check.order) : greedy_degree(out.graph, tie);
    std::swap(vertices, trial_vertices);
    std::swap(edges, trial_edges);
  }
  return out;
}

namespace {

// The lightest selected tree lies inside the union and bounds the DP.
SteinerSolution solve_union(const SteinerInstance& instance, const SolutionPool& pool,
                            const UnionSelection& selection, const MergeConfig& cfg) {
  const auto sub = instance.restricted_to(selection.graph);
  const auto td = decomposition_from_order(selection.graph, selection.order);
  const auto nice = make_nice(selection.graph, td, instance.terminals().front());
  DpOptions options = cfg.dp;
  for (std::size_t index : selection.selected) {
    const Weight w = pool.solutions[index].weight;
    options.upper_bound = options.upper_bound ? std::min(*options.upper_bound, w) : w;
  }
  return dp_solve(sub, nice, options);
}

std::vector<std::size_t> round_order(const SolutionPool& pool, const MergeConfig& cfg, int round) {
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(round)));
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return order;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> team;
  for (std::size_t w = 0; w < workers; ++w) {
    team.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  }
}

struct UnionResult {
  std::optional<SteinerSolution> tree;
  std::string skipped;
  bool timed_out = false;
  double seconds = 0.0;
};

}  // namespace

RankingState ranking_procedure(const SteinerInstance& instance, const SolutionPool& pool, const MergeConfig& cfg) {
  cfg.check();
  if (pool.empty()) throw InconsistencyError("ranking_procedure: empty pool");
  RankingState state;
  for (const auto& tree : pool.solutions) state.z.push_back({tree.weight});

  const auto rounds = static_cast<std::size_t>(cfg.rank_iterations);
  std::vector<UnionSelection> selections(rounds);
  parallel_for(rounds, cfg.threads, [&](std::size_t i) {
    const auto order = round_order(pool, cfg, static_cast<int>(i));
    selections[i] = greedy_steiner_union(instance, pool, order, cfg.rank_width, cfg.tie);
  });

  // The union and its elimination order depend only on the selected set, so
  // rounds that pick the same trees share one DP.
  std::map<std::vector<std::size_t>, std::size_t> distinct;
  std::vector<std::size_t> solve_of(rounds);
  std::vector<std::size_t> first_round;
  for (std::size_t i = 0; i < rounds; ++i) {
    auto key = selections[i].selected;
    std::sort(key.begin(), key.end());
    const auto [it, fresh] = distinct.try_emplace(std::move(key), first_round.size());
    if (fresh) first_round.push_back(i);
    solve_of[i] = it->second;
  }
  std::vector<UnionResult> solved(first_round.size());
  parallel_for(first_round.size(), cfg.threads, [&](std::size_t k) {
    UnionResult& out = solved[k];
    if (cfg.dp.deadline.expired()) {
      out.skipped = "time limit";
      out.timed_out = true;
      return;
    }
    const Stopwatch clock;
    try {
      out.tree = solve_union(instance, pool, selections[first_round[k]], cfg);
    } catch (const CapacityError& e) {
      out.skipped = e.what();
    } catch (const TimeoutError&) {
      out.skipped = "time limit";
      out.timed_out = true;
    }
    out.seconds = clock.seconds();
  });

  for (std::size_t i = 0; i < rounds; ++i) {
    const auto k = solve_of[i];
    const UnionResult& result = solved[k];
    RankingIteration entry;
    entry.selected = std::move(selections[i].selected);
    entry.width = selections[i].order.width;
    entry.skipped = result.skipped;
    entry.seconds = first_round[k] == i ? result.seconds : 0.0;
    state.timed_out = state.timed_out || result.timed_out;
    if (result.tree) {
      entry.value = result.tree->weight;
      for (std::size_t index : entry.selected) state.z[index].push_back(*entry.value);
      if (cfg.keep_best && (!state.incumbent || result.tree->weight < state.incumbent->weight)) {
        state.incumbent = *result.tree;
      }
    }
    state.log.push_back(std::move(entry));
  }
  for (const auto& values : state.z) {
    state.adjusted.push_back({std::accumulate(values.begin(), values.end(), Weight{0}),
                              static_cast<std::int64_t>(values.size())});
  }
  return state;
}

std::vector<std::size_t> ranked_order(const SolutionPool& pool, const std::vector<Mean>& adjusted) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (const auto c = adjusted[a] <=> adjusted[b]; c != 0) return c < 0;
    if (pool.solutions[a].weight != pool.solutions[b].weight) return pool.solutions[a].weight < pool.solutions[b].weight;
    return a < b;
  });
  return order;
}

const char* to_string(ResultSource source) {
  switch (source) {
    case ResultSource::kFinalUnion: return "final-union";
    case ResultSource::kRanking: return "ranking";
    case ResultSource::kPool: return "pool";
  }
  return "?";
}

MergeReport run_smh(const SteinerInstance& instance, const SolutionPool& pool, const MergeConfig& cfg) {
  cfg.check();
  if (pool.empty()) throw InconsistencyError("run_smh: empty pool");
  MergeReport report;
  report.instance = instance.name();
  report.pool_size = pool.size();
  const auto pool_best = pool.best_index();
  report.pool_best = pool.solutions[pool_best].weight;
  report.best = pool.solutions[pool_best];

  const Stopwatch ranking_clock;
  report.ranking = ranking_procedure(instance, pool, cfg);
  report.ranking_seconds = ranking_clock.seconds();
  report.timed_out = report.ranking.timed_out;
  if (report.ranking.incumbent && report.ranking.incumbent->weight <= report.best.weight) {
    report.best = *report.ranking.incumbent;
    report.source = ResultSource::kRanking;
  }

  const Stopwatch final_clock;
  report.order = ranked_order(pool, report.ranking.adjusted);
  const auto selection = greedy_steiner_union(instance, pool, report.order, cfg.max_width, cfg.tie);
  report.trees_used = selection.selected;
  report.final_width = selection.order.width;
  report.union_vertices = selection.graph.vertex_count();
  report.union_edges = selection.graph.edge_count();
  if (cfg.dp.deadline.expired()) {
    report.timed_out = true;
  } else {
    try {
      auto tree = solve_union(instance, pool, selection, cfg);
      report.final_value = tree.weight;
      if (tree.weight <= report.best.weight) {
        report.best = std::move(tree);
        report.source = ResultSource::kFinalUnion;
      }
    } catch (const CapacityError&) {
      report.capacity_fallback = true;
    } catch (const TimeoutError&) {
      report.timed_out = true;
    }
  }
  report.final_seconds = final_clock.seconds();
  return report;
}

}  // namespace smh
