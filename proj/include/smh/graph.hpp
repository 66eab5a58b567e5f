#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smh {

using Vertex = std::int32_t;
using Weight = std::int64_t;

inline constexpr Vertex kNoVertex = -1;

/// Undirected weighted edge, stored with u < v.
struct Edge {
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  Weight w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Returns the edge with its endpoints in ascending order.
inline Edge normalized(Edge e) {
  if (e.u > e.v) std::swap(e.u, e.v);
  return e;
}

struct Arc {
  Vertex to;
  Weight w;
  std::int32_t edge;  // index into WeightedGraph::edges()
};

/// Simple undirected graph with nonnegative integer weights.
///
/// Vertex ids live in a shared id space [0, id_bound) so that subgraphs of
/// one host instance (solution trees, unions of trees) keep the host ids.
/// Only the ids listed in vertices() are members. Immutable after
/// construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Throws InconsistencyError on self-loops, parallel edges, negative
  /// weights or endpoints outside the vertex set.
  WeightedGraph(Vertex id_bound, std::vector<Vertex> vertices, std::vector<Edge> edges);

  /// Graph whose vertex set is the endpoints of `edges` plus `extra`.
  static WeightedGraph from_edges(Vertex id_bound, std::vector<Edge> edges,
                                  std::span<const Vertex> extra = {});

  /// Graph with vertices 0..n-1.
  static WeightedGraph complete_vertex_set(Vertex n, std::vector<Edge> edges);

  Vertex id_bound() const { return id_bound_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Member vertices, ascending.
  const std::vector<Vertex>& vertices() const { return vertices_; }
  /// Edges sorted by (u, v).
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_vertex(Vertex v) const {
    return v >= 0 && v < id_bound_ && member_[static_cast<std::size_t>(v)] != 0;
  }
  std::span<const Arc> neighbors(Vertex v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  std::size_t degree(Vertex v) const { return adjacency_[static_cast<std::size_t>(v)].size(); }

  std::optional<Weight> edge_weight(Vertex u, Vertex v) const;
  /// Index of edge {u,v} in edges(), or -1.
  std::int32_t edge_index(Vertex u, Vertex v) const;

  Weight total_weight() const;
  bool is_connected() const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.id_bound_ == b.id_bound_ && a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  Vertex id_bound_ = 0;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<char> member_;
  std::vector<std::vector<Arc>> adjacency_;
};

/// Union of vertex and edge sets. All operands must share one id space;
/// an edge present in two operands with different weights throws
/// InconsistencyError.
WeightedGraph graph_union(std::span<const WeightedGraph> graphs);

/// Connected graph plus a nonempty terminal set.
class SteinerInstance {
 public:
  SteinerInstance() = default;

  /// Throws InconsistencyError if the terminal set is empty, names a
  /// non-member vertex, or the graph is disconnected.
  SteinerInstance(WeightedGraph graph, std::vector<Vertex> terminals, std::string name = {},
                  std::vector<std::int64_t> file_ids = {});

  const WeightedGraph& graph() const { return graph_; }
  /// Ascending, duplicate-free.
  const std::vector<Vertex>& terminals() const { return terminals_; }
  bool is_terminal(Vertex v) const { return terminal_mask_[static_cast<std::size_t>(v)] != 0; }
  const std::string& name() const { return name_; }

  /// External (1-based) id of an internal vertex.
  std::int64_t file_id(Vertex v) const {
    return file_ids_.empty() ? static_cast<std::int64_t>(v) + 1 : file_ids_[static_cast<std::size_t>(v)];
  }
  const std::vector<std::int64_t>& file_ids() const { return file_ids_; }

  /// Same terminals and name over a different graph in the same id space
  /// (typically a subgraph of this instance).
  SteinerInstance restricted_to(WeightedGraph subgraph) const;

 private:
  WeightedGraph graph_;
  std::vector<Vertex> terminals_;
  std::vector<char> terminal_mask_;
  std::string name_;
  std::vector<std::int64_t> file_ids_;
};

/// A pruned Steiner tree: edges sorted canonically, weight cached.
struct SteinerSolution {
  std::vector<Edge> edges;
  Weight weight = 0;

  /// Vertex set: tree endpoints plus all terminals (a one-terminal tree has
  /// no edges but still covers its terminal).
  std::vector<Vertex> vertex_set(const SteinerInstance& instance) const;
  WeightedGraph as_graph(const SteinerInstance& instance) const;

  friend bool operator==(const SteinerSolution&, const SteinerSolution&) = default;
};

/// Every violated SteinerSolution invariant, as human-readable messages.
/// Empty means valid.
std::vector<std::string> validate_solution(const SteinerInstance& instance,
                                           const SteinerSolution& solution);

/// Minimum spanning forest of the given host edges, restricted to the tree
/// containing the terminals, then stripped of non-terminal leaves until
/// none remain. Throws InfeasibleError if the edges leave terminals
/// disconnected.
SteinerSolution prune(const SteinerInstance& instance, std::span<const Edge> edges);

inline constexpr Weight kUnreachable = std::numeric_limits<Weight>::max();

struct ShortestPathTree {
  std::vector<Weight> distance;     // kUnreachable where not reached
  std::vector<Vertex> predecessor;  // kNoVertex for the source and unreached
};

/// Dijkstra from `source`. Arrays are indexed by vertex id.
ShortestPathTree shortest_paths(const WeightedGraph& g, Vertex source);

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  /// Returns false if already joined.
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace smh
