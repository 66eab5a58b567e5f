#include "smh/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "smh/error.hpp"

namespace smh {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformedHeader: return "malformed header";
    case ParseErrorKind::kSyntax: return "syntax error";
    case ParseErrorKind::kTerminalOutOfRange: return "terminal id out of range";
    case ParseErrorKind::kEdgeOutOfRange: return "edge endpoint out of range";
    case ParseErrorKind::kFractionalWeight: return "fractional weight";
    case ParseErrorKind::kNegativeWeight: return "negative weight";
    case ParseErrorKind::kDisconnected: return "disconnected graph";
    case ParseErrorKind::kNoTerminals: return "no terminals";
  }
  return "parse error";
}

WeightedGraph::WeightedGraph(Vertex id_bound, std::vector<Vertex> vertices, std::vector<Edge> edges)
    : id_bound_(id_bound), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (id_bound_ < 0) throw InconsistencyError("negative id bound");
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()), vertices_.end());
  member_.assign(static_cast<std::size_t>(id_bound_), 0);
  for (Vertex v : vertices_) {
    if (v < 0 || v >= id_bound_) {
      throw InconsistencyError("vertex " + std::to_string(v) + " outside id space");
    }
    member_[static_cast<std::size_t>(v)] = 1;
  }
  for (Edge& e : edges_) {
    e = normalized(e);
    if (e.u == e.v) throw InconsistencyError("self-loop at vertex " + std::to_string(e.u));
    if (e.w < 0) throw InconsistencyError("negative edge weight");
    if (!has_vertex(e.u) || !has_vertex(e.v)) {
      throw InconsistencyError("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                               "} has an endpoint outside the vertex set");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw InconsistencyError("parallel edge {" + std::to_string(edges_[i].u) + "," +
                               std::to_string(edges_[i].v) + "}");
    }
  }
  adjacency_.resize(static_cast<std::size_t>(id_bound_));
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[static_cast<std::size_t>(e.u)].push_back({e.v, e.w, static_cast<std::int32_t>(i)});
    adjacency_[static_cast<std::size_t>(e.v)].push_back({e.u, e.w, static_cast<std::int32_t>(i)});
  }
}

WeightedGraph WeightedGraph::from_edges(Vertex id_bound, std::vector<Edge> edges,
                                        std::span<const Vertex> extra) {
  std::vector<Vertex> vertices(extra.begin(), extra.end());
  vertices.reserve(vertices.size() + 2 * edges.size());
  for (const Edge& e : edges) {
    vertices.push_back(e.u);
    vertices.push_back(e.v);
  }
  return WeightedGraph(id_bound, std::move(vertices), std::move(edges));
}

WeightedGraph WeightedGraph::complete_vertex_set(Vertex n, std::vector<Edge> edges) {
  std::vector<Vertex> vertices(static_cast<std::size_t>(n));
  std::iota(vertices.begin(), vertices.end(), 0);
  return WeightedGraph(n, std::move(vertices), std::move(edges));
}

std::int32_t WeightedGraph::edge_index(Vertex u, Vertex v) const {
  if (!has_vertex(u) || !has_vertex(v)) return -1;
  if (degree(u) > degree(v)) std::swap(u, v);
  for (const Arc& a : neighbors(u)) {
    if (a.to == v) return a.edge;
  }
  return -1;
}

std::optional<Weight> WeightedGraph::edge_weight(Vertex u, Vertex v) const {
  const std::int32_t i = edge_index(u, v);
  if (i < 0) return std::nullopt;
  return edges_[static_cast<std::size_t>(i)].w;
}

Weight WeightedGraph::total_weight() const {
  Weight sum = 0;
  for (const Edge& e : edges_) sum += e.w;
  return sum;
}

bool WeightedGraph::is_connected() const {
  if (vertices_.empty()) return true;
  std::vector<char> seen(static_cast<std::size_t>(id_bound_), 0);
  std::vector<Vertex> stack{vertices_.front()};
  seen[static_cast<std::size_t>(vertices_.front())] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const Arc& a : neighbors(v)) {
      if (!seen[static_cast<std::size_t>(a.to)]) {
        seen[static_cast<std::size_t>(a.to)] = 1;
        ++reached;
        stack.push_back(a.to);
      }
    }
  }
  return reached == vertices_.size();
}

WeightedGraph graph_union(std::span<const WeightedGraph> graphs) {
  if (graphs.empty()) return {};
  Vertex id_bound = 0;
  for (const auto& g : graphs) id_bound = std::max(id_bound, g.id_bound());

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  for (const auto& g : graphs) {
    vertices.insert(vertices.end(), g.vertices().begin(), g.vertices().end());
    edges.insert(edges.end(), g.edges().begin(), g.edges().end());
  }
  std::sort(edges.begin(), edges.end());
  std::vector<Edge> merged;
  merged.reserve(edges.size());
  for (const Edge& e : edges) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      if (merged.back().w != e.w) {
        throw InconsistencyError("conflicting weights for edge {" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) + "}");
      }
      continue;
    }
    merged.push_back(e);
  }
  return WeightedGraph(id_bound, std::move(vertices), std::move(merged));
}

SteinerInstance::SteinerInstance(WeightedGraph graph, std::vector<Vertex> terminals,
                                 std::string name, std::vector<std::int64_t> file_ids)
    : graph_(std::move(graph)),
      terminals_(std::move(terminals)),
      name_(std::move(name)),
      file_ids_(std::move(file_ids)) {
  std::sort(terminals_.begin(), terminals_.end());
  terminals_.erase(std::unique(terminals_.begin(), terminals_.end()), terminals_.end());
  if (terminals_.empty()) throw InconsistencyError("instance has no terminals");
  terminal_mask_.assign(static_cast<std::size_t>(graph_.id_bound()), 0);
  for (Vertex t : terminals_) {
    if (!graph_.has_vertex(t)) {
      throw InconsistencyError("terminal " + std::to_string(t) + " is not a graph vertex");
    }
    terminal_mask_[static_cast<std::size_t>(t)] = 1;
  }
  if (!graph_.is_connected()) throw InconsistencyError("instance graph is disconnected");
  if (!file_ids_.empty() && file_ids_.size() != static_cast<std::size_t>(graph_.id_bound())) {
    throw InconsistencyError("file id map does not match the id space");
  }
}

SteinerInstance SteinerInstance::restricted_to(WeightedGraph subgraph) const {
  if (subgraph.id_bound() != graph_.id_bound()) {
    throw InconsistencyError("subgraph uses a different id space");
  }
  return SteinerInstance(std::move(subgraph), terminals_, name_, file_ids_);
}

std::vector<Vertex> SteinerSolution::vertex_set(const SteinerInstance& instance) const {
  std::vector<Vertex> vs(instance.terminals());
  for (const Edge& e : edges) {
    vs.push_back(e.u);
    vs.push_back(e.v);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

WeightedGraph SteinerSolution::as_graph(const SteinerInstance& instance) const {
  return WeightedGraph(instance.graph().id_bound(), vertex_set(instance), edges);
}

std::vector<std::string> validate_solution(const SteinerInstance& instance,
                                           const SteinerSolution& solution) {
  std::vector<std::string> problems;
  const WeightedGraph& host = instance.graph();
  Weight sum = 0;
  for (const Edge& e : solution.edges) {
    const auto w = host.edge_weight(e.u, e.v);
    if (!w) {
      problems.push_back("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         "} is not in the instance graph");
      continue;
    }
    if (*w != e.w) problems.push_back("edge weight differs from the instance graph");
    sum += *w;
  }
  if (sum != solution.weight) {
    problems.push_back("cached weight " + std::to_string(solution.weight) + " != edge sum " +
                       std::to_string(sum));
  }
  if (!problems.empty()) return problems;

  WeightedGraph tree;
  try {
    tree = solution.as_graph(instance);
  } catch (const InconsistencyError& e) {
    problems.emplace_back(e.what());
    return problems;
  }
  if (tree.edge_count() + 1 != tree.vertex_count()) {
    problems.push_back("edge count " + std::to_string(tree.edge_count()) +
                       " does not match a tree on " + std::to_string(tree.vertex_count()) +
                       " vertices");
  }
  if (!tree.is_connected()) problems.emplace_back("tree is disconnected or misses a terminal");
  for (Vertex v : tree.vertices()) {
    if (tree.degree(v) == 1 && !instance.is_terminal(v)) {
      problems.push_back("non-terminal leaf " + std::to_string(v));
    }
  }
  return problems;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

SteinerSolution prune(const SteinerInstance& instance, std::span<const Edge> edges) {
  const auto n = static_cast<std::size_t>(instance.graph().id_bound());
  std::vector<Edge> sorted;
  sorted.reserve(edges.size());
  for (const Edge& e : edges) sorted.push_back(normalized(e));
  std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  DisjointSets sets(n);
  std::vector<Edge> forest;
  for (const Edge& e : sorted) {
    if (sets.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) forest.push_back(e);
  }
  const auto& terminals = instance.terminals();
  const std::size_t root = sets.find(static_cast<std::size_t>(terminals.front()));
  for (Vertex t : terminals) {
    if (sets.find(static_cast<std::size_t>(t)) != root) {
      throw InfeasibleError("terminal " + std::to_string(t) + " is not connected by the edge set");
    }
  }
  std::erase_if(forest, [&](const Edge& e) { return sets.find(static_cast<std::size_t>(e.u)) != root; });

  // Peel non-terminal leaves.
  std::vector<int> degree(n, 0);
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    ++degree[static_cast<std::size_t>(forest[i].u)];
    ++degree[static_cast<std::size_t>(forest[i].v)];
    incident[static_cast<std::size_t>(forest[i].u)].push_back(i);
    incident[static_cast<std::size_t>(forest[i].v)].push_back(i);
  }
  std::vector<char> removed(forest.size(), 0);
  std::vector<Vertex> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 1 && !instance.is_terminal(static_cast<Vertex>(v))) leaves.push_back(static_cast<Vertex>(v));
  }
  while (!leaves.empty()) {
    const auto v = static_cast<std::size_t>(leaves.back());
    leaves.pop_back();
    if (degree[v] != 1) continue;
    for (std::size_t i : incident[v]) {
      if (removed[i]) continue;
      removed[i] = 1;
      --degree[v];
      const Vertex other = forest[i].u == static_cast<Vertex>(v) ? forest[i].v : forest[i].u;
      if (--degree[static_cast<std::size_t>(other)] == 1 && !instance.is_terminal(other)) {
        leaves.push_back(other);
      }
      break;
    }
  }

  SteinerSolution out;
  for (std::size_t i = 0; i < forest.size(); ++i) {
    if (!removed[i]) {
      out.edges.push_back(forest[i]);
      out.weight += forest[i].w;
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

ShortestPathTree shortest_paths(const WeightedGraph& g, Vertex source) {
  const auto n = static_cast<std::size_t>(g.id_bound());
  ShortestPathTree spt{std::vector<Weight>(n, kUnreachable), std::vector<Vertex>(n, kNoVertex)};
  if (!g.has_vertex(source)) throw InconsistencyError("source is not a graph vertex");
  using Item = std::pair<Weight, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  spt.distance[static_cast<std::size_t>(source)] = 0;
  heap.emplace(0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d != spt.distance[static_cast<std::size_t>(v)]) continue;
    for (const Arc& a : g.neighbors(v)) {
      const Weight nd = d + a.w;
      auto& cur = spt.distance[static_cast<std::size_t>(a.to)];
      if (nd < cur) {
        cur = nd;
        spt.predecessor[static_cast<std::size_t>(a.to)] = v;
        heap.emplace(nd, a.to);
      }
    }
  }
  return spt;
}

}  // namespace smh
