#pragma once

// Instance generators and brute-force oracles shared by the test suites.
// Nothing here calls into the solvers under test.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "smh/graph.hpp"
#include "smh/random.hpp"

namespace smh::testing {

inline Weight random_weight(Rng& rng, Weight lo, Weight hi) {
  return lo + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

inline std::vector<Vertex> pick_distinct(Rng& rng, std::vector<Vertex> pool, std::size_t count) {
  rng.shuffle(pool);
  pool.resize(std::min(count, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Random spanning tree plus random extra edges, up to `m` edges total.
inline std::vector<Edge> random_connected_edges(Rng& rng, Vertex n, std::size_t m, Weight lo, Weight hi) {
  std::set<std::pair<Vertex, Vertex>> used;
  std::vector<Edge> edges;
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (Vertex i = 1; i < n; ++i) {
    const Vertex a = perm[static_cast<std::size_t>(i)];
    const Vertex b = perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i)))];
    used.insert({std::min(a, b), std::max(a, b)});
    edges.push_back(normalized({a, b, random_weight(rng, lo, hi)}));
  }
  const std::size_t max_edges = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  m = std::min(m, max_edges);
  while (edges.size() < m) {
    const auto a = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
    const auto b = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
    if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second) continue;
    edges.push_back(normalized({a, b, random_weight(rng, lo, hi)}));
  }
  return edges;
}

inline SteinerInstance random_instance(Rng& rng, Vertex n, std::size_t m, std::size_t q, Weight lo = 1,
                                       Weight hi = 100) {
  auto edges = random_connected_edges(rng, n, m, lo, hi);
  std::vector<Vertex> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  auto terminals = pick_distinct(rng, all, q);
  return SteinerInstance(WeightedGraph::complete_vertex_set(n, std::move(edges)), std::move(terminals), "random");
}

inline WeightedGraph path_graph(Vertex n, Weight w = 1) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return WeightedGraph::complete_vertex_set(n, std::move(edges));
}

inline WeightedGraph cycle_graph(Vertex n, Weight w = 1) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) edges.push_back(normalized({i, (i + 1) % n, w}));
  return WeightedGraph::complete_vertex_set(n, std::move(edges));
}

inline WeightedGraph complete_graph(Vertex n, Weight w = 1) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  return WeightedGraph::complete_vertex_set(n, std::move(edges));
}

inline WeightedGraph grid_graph(Vertex rows, Vertex cols, Weight w = 1) {
  std::vector<Edge> edges;
  auto id = [&](Vertex r, Vertex c) { return r * cols + c; };
  for (Vertex r = 0; r < rows; ++r) {
    for (Vertex c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), w});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), w});
    }
  }
  return WeightedGraph::complete_vertex_set(rows * cols, std::move(edges));
}

inline WeightedGraph random_tree(Rng& rng, Vertex n) {
  return WeightedGraph::complete_vertex_set(n, random_connected_edges(rng, n, static_cast<std::size_t>(n - 1), 1, 9));
}

/// Grid with rectangular holes (VLSI-like), max degree 4. Vertices are
/// renumbered densely over the largest remaining component.
inline SteinerInstance grid_with_holes(Rng& rng, Vertex rows, Vertex cols, int holes, std::size_t q,
                                       Weight lo = 1, Weight hi = 20) {
  std::vector<char> alive(static_cast<std::size_t>(rows * cols), 1);
  for (int h = 0; h < holes; ++h) {
    const auto hr = static_cast<Vertex>(1 + rng.below(4));
    const auto hc = static_cast<Vertex>(1 + rng.below(4));
    const auto r0 = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(rows - hr)));
    const auto c0 = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(cols - hc)));
    for (Vertex r = r0; r < r0 + hr; ++r)
      for (Vertex c = c0; c < c0 + hc; ++c) alive[static_cast<std::size_t>(r * cols + c)] = 0;
  }
  auto id = [&](Vertex r, Vertex c) { return r * cols + c; };
  std::vector<Edge> edges;
  for (Vertex r = 0; r < rows; ++r) {
    for (Vertex c = 0; c < cols; ++c) {
      if (!alive[static_cast<std::size_t>(id(r, c))]) continue;
      if (c + 1 < cols && alive[static_cast<std::size_t>(id(r, c + 1))])
        edges.push_back({id(r, c), id(r, c + 1), random_weight(rng, lo, hi)});
      if (r + 1 < rows && alive[static_cast<std::size_t>(id(r + 1, c))])
        edges.push_back({id(r, c), id(r + 1, c), random_weight(rng, lo, hi)});
    }
  }
  // Largest component.
  const auto total = static_cast<std::size_t>(rows * cols);
  DisjointSets sets(total);
  for (const Edge& e : edges) sets.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v));
  std::vector<std::size_t> size(total, 0);
  for (std::size_t v = 0; v < total; ++v)
    if (alive[v]) ++size[sets.find(v)];
  const std::size_t best = static_cast<std::size_t>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<Vertex> remap(total, kNoVertex);
  Vertex next = 0;
  for (std::size_t v = 0; v < total; ++v)
    if (alive[v] && sets.find(v) == best) remap[v] = next++;
  std::vector<Edge> kept;
  for (const Edge& e : edges) {
    if (remap[static_cast<std::size_t>(e.u)] != kNoVertex && remap[static_cast<std::size_t>(e.v)] != kNoVertex)
      kept.push_back(normalized({remap[static_cast<std::size_t>(e.u)], remap[static_cast<std::size_t>(e.v)], e.w}));
  }
  std::vector<Vertex> all(static_cast<std::size_t>(next));
  std::iota(all.begin(), all.end(), 0);
  auto terminals = pick_distinct(rng, all, q);
  return SteinerInstance(WeightedGraph::complete_vertex_set(next, std::move(kept)), std::move(terminals),
                         "grid-holes");
}

/// Dense Erdos-Renyi-style instance: spanning tree plus edges up to `density`.
inline SteinerInstance dense_instance(Rng& rng, Vertex n, double density, std::size_t q) {
  const auto m = static_cast<std::size_t>(density * n * (n - 1) / 2.0);
  return random_instance(rng, n, m, q, 1, 100);
}

// ---------------------------------------------------------------- oracles

/// Shortest s-t distance by exhaustive enumeration of simple paths.
inline Weight brute_force_distance(const WeightedGraph& g, Vertex s, Vertex t) {
  Weight best = kUnreachable;
  std::vector<char> on_path(static_cast<std::size_t>(g.id_bound()), 0);
  std::function<void(Vertex, Weight)> walk = [&](Vertex v, Weight d) {
    if (v == t) {
      best = std::min(best, d);
      return;
    }
    on_path[static_cast<std::size_t>(v)] = 1;
    for (const Arc& a : g.neighbors(v))
      if (!on_path[static_cast<std::size_t>(a.to)]) walk(a.to, d + a.w);
    on_path[static_cast<std::size_t>(v)] = 0;
  };
  walk(s, 0);
  return best;
}

/// Optimal Steiner weight by enumerating every edge subset (|E| <= 22).
inline Weight brute_force_steiner(const SteinerInstance& instance) {
  const auto& edges = instance.graph().edges();
  const auto m = edges.size();
  if (m > 22) throw std::invalid_argument("brute_force_steiner: too many edges");
  const auto n = static_cast<std::size_t>(instance.graph().id_bound());
  Weight best = instance.terminals().size() == 1 ? 0 : kUnreachable;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    Weight w = 0;
    DisjointSets sets(n);
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        w += edges[i].w;
        sets.unite(static_cast<std::size_t>(edges[i].u), static_cast<std::size_t>(edges[i].v));
      }
    }
    if (w >= best) continue;
    const auto root = sets.find(static_cast<std::size_t>(instance.terminals().front()));
    bool ok = true;
    for (Vertex t : instance.terminals()) ok = ok && sets.find(static_cast<std::size_t>(t)) == root;
    if (ok) best = w;
  }
  return best;
}

}  // namespace smh::testing
