#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smh/exact.hpp"
#include "smh/generator.hpp"
#include "smh/graph.hpp"
#include "smh/treewidth.hpp"

namespace smh {

struct MergeConfig {
  int max_width = 10;       // m: cap for the final union
  int rank_width = 8;       // k: cap for ranking unions
  int rank_iterations = 20;  // r
  bool keep_best = true;
  std::uint64_t seed = 0;
  TieBreak tie = TieBreak::kLowestId;
  /// Budget and deadline for every DP call.
  DpOptions dp;
  /// Ranking iterations run on this many threads; results do not depend on it.
  int threads = 1;

  /// Throws std::invalid_argument unless 1 <= k <= m and r >= 0.
  void check() const;
};

/// Trees accepted by the greedy width-capped union, in acceptance order.
struct UnionSelection {
  std::vector<std::size_t> selected;  // pool indices
  WeightedGraph graph;
  EliminationOrder order;  // GreedyDegree order of graph, width <= cap
};

/// Walks the pool in `order`, keeping each tree whose addition leaves the
/// union within width `max_width` under GreedyDegree. The first tree is
/// always kept.
UnionSelection greedy_steiner_union(const SteinerInstance& instance, const SolutionPool& pool,
                                    std::span<const std::size_t> order, int max_width,
                                    TieBreak tie = TieBreak::kLowestId);

/// Exact mean sum/count, compared without rounding.
struct Mean {
  Weight sum = 0;
  std::int64_t count = 1;

  double value() const { return static_cast<double>(sum) / static_cast<double>(count); }
  friend std::strong_ordering operator<=>(const Mean& a, const Mean& b) {
    return static_cast<__int128>(a.sum) * b.count <=> static_cast<__int128>(b.sum) * a.count;
  }
  friend bool operator==(const Mean& a, const Mean& b) { return (a <=> b) == 0; }
};

struct RankingIteration {
  std::vector<std::size_t> selected;
  int width = 0;
  std::optional<Weight> value;  // DP optimum of the union; empty if skipped
  std::string skipped;          // reason when value is empty
  double seconds = 0.0;         // 0 when an earlier round had the same union
};

struct RankingState {
  std::vector<std::vector<Weight>> z;  // per pool member, starts with f(T)
  std::vector<Mean> adjusted;          // mean of z
  std::vector<RankingIteration> log;
  std::optional<SteinerSolution> incumbent;  // best DP tree, when keep_best
  bool timed_out = false;
};

/// r rounds of: shuffle the pool order, take the greedy union at width k,
/// solve it exactly and append the optimum to the value list of every tree
/// in the union. A round whose DP runs out of budget is logged and skipped;
/// a deadline stops further rounds. Rounds selecting the same set of trees
/// reuse one DP result.
RankingState ranking_procedure(const SteinerInstance& instance, const SolutionPool& pool, const MergeConfig& cfg);

/// Pool order by adjusted value, then weight, then pool index.
std::vector<std::size_t> ranked_order(const SolutionPool& pool, const std::vector<Mean>& adjusted);

enum class ResultSource { kFinalUnion, kRanking, kPool };
const char* to_string(ResultSource source);

struct MergeReport {
  std::string instance;
  std::size_t pool_size = 0;
  Weight pool_best = 0;
  RankingState ranking;
  std::vector<std::size_t> order;  // sorted pool order used for the final union
  std::vector<std::size_t> trees_used;
  int final_width = 0;
  std::size_t union_vertices = 0;
  std::size_t union_edges = 0;
  std::optional<Weight> final_value;  // empty if the final DP failed
  SteinerSolution best;
  ResultSource source = ResultSource::kPool;
  bool capacity_fallback = false;
  bool timed_out = false;
  double ranking_seconds = 0.0;
  double final_seconds = 0.0;

  bool degraded() const { return capacity_fallback || timed_out; }
};

/// Full merge: ranking, sort, greedy union at width m, exact solve of the
/// union, and the lightest of the final tree, the ranking incumbent and the
/// best pool tree. Never worse than the best pool tree.
MergeReport run_smh(const SteinerInstance& instance, const SolutionPool& pool, const MergeConfig& cfg);

}  // namespace smh
