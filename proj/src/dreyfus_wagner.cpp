#include <bit>
#include <queue>

#include "smh/error.hpp"
#include "smh/exact.hpp"

namespace smh {

SteinerSolution dreyfus_wagner(const SteinerInstance& instance, int terminal_cap) {
  const auto& terminals = instance.terminals();
  const int k = static_cast<int>(terminals.size());
  if (k > terminal_cap) {
    throw RefusedError("Dreyfus-Wagner refuses " + std::to_string(k) + " terminals (cap " +
                       std::to_string(terminal_cap) + ")");
  }
  if (k == 1) return {};
  if (k - 1 > 30) throw RefusedError("terminal count too large for subset indexing");

  const WeightedGraph& g = instance.graph();
  const auto n = static_cast<std::size_t>(g.id_bound());
  const Vertex root = terminals.back();
  const std::uint32_t subsets = 1u << (k - 1);  // over terminals[0..k-2]

  // cost[S * n + v]: cheapest tree spanning S and v.
  std::vector<Weight> cost(static_cast<std::size_t>(subsets) * n, kUnreachable);
  std::vector<Vertex> pred(cost.size(), kNoVertex);
  std::vector<std::uint32_t> split(cost.size(), 0);

  using Item = std::pair<Weight, Vertex>;
  for (std::uint32_t s = 1; s < subsets; ++s) {
    const std::size_t base = static_cast<std::size_t>(s) * n;
    if (std::has_single_bit(s)) {
      cost[base + static_cast<std::size_t>(terminals[static_cast<std::size_t>(std::countr_zero(s))])] = 0;
    } else {
      // Split at v into two nonempty parts; fix the lowest bit in `part` to halve the work.
      const std::uint32_t low = s & (~s + 1);
      for (std::uint32_t part = (s - 1) & s; part != 0; part = (part - 1) & s) {
        if (!(part & low)) continue;
        const std::size_t pa = static_cast<std::size_t>(part) * n;
        const std::size_t pb = static_cast<std::size_t>(s ^ part) * n;
        for (Vertex v : g.vertices()) {
          const auto vi = static_cast<std::size_t>(v);
          if (cost[pa + vi] == kUnreachable || cost[pb + vi] == kUnreachable) continue;
          const Weight c = cost[pa + vi] + cost[pb + vi];
          if (c < cost[base + vi]) {
            cost[base + vi] = c;
            split[base + vi] = part;
          }
        }
      }
    }
    // Extend along shortest paths.
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (Vertex v : g.vertices()) {
      if (cost[base + static_cast<std::size_t>(v)] != kUnreachable) heap.emplace(cost[base + static_cast<std::size_t>(v)], v);
    }
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d != cost[base + static_cast<std::size_t>(v)]) continue;
      for (const Arc& a : g.neighbors(v)) {
        const std::size_t at = base + static_cast<std::size_t>(a.to);
        if (d + a.w < cost[at]) {
          cost[at] = d + a.w;
          pred[at] = v;
          heap.emplace(cost[at], a.to);
        }
      }
    }
  }

  const std::uint32_t full = subsets - 1;
  if (cost[static_cast<std::size_t>(full) * n + static_cast<std::size_t>(root)] == kUnreachable) {
    throw InfeasibleError("terminals are not connected");
  }

  std::vector<Edge> edges;
  std::vector<std::pair<std::uint32_t, Vertex>> stack{{full, root}};
  while (!stack.empty()) {
    const auto [s, v] = stack.back();
    stack.pop_back();
    const std::size_t at = static_cast<std::size_t>(s) * n + static_cast<std::size_t>(v);
    if (pred[at] != kNoVertex) {
      edges.push_back(normalized({pred[at], v, cost[at] - cost[static_cast<std::size_t>(s) * n + static_cast<std::size_t>(pred[at])]}));
      stack.emplace_back(s, pred[at]);
    } else if (!std::has_single_bit(s)) {
      stack.emplace_back(split[at], v);
      stack.emplace_back(s ^ split[at], v);
    }
  }
  for (Edge& e : edges) e.w = *g.edge_weight(e.u, e.v);
  SteinerSolution tree = prune(instance, edges);
  const Weight expected = cost[static_cast<std::size_t>(full) * n + static_cast<std::size_t>(root)];
  if (tree.weight != expected) {
    throw std::logic_error("Dreyfus-Wagner reconstruction weight mismatch");
  }
  return tree;
}

}  // namespace smh
