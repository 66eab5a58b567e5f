#include "smh/treewidth.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "smh/error.hpp"

namespace smh {
namespace {

// Working copy of a graph that supports vertex elimination with fill-in.
class FillGraph {
 public:
  explicit FillGraph(const WeightedGraph& g) : adj_(static_cast<std::size_t>(g.id_bound())) {
    for (Vertex v : g.vertices()) {
      auto& list = adj_[static_cast<std::size_t>(v)];
      for (const Arc& a : g.neighbors(v)) list.push_back(a.to);
      std::sort(list.begin(), list.end());
    }
  }

  int degree(Vertex v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(v)]; }

  /// Makes N(v) a clique and removes v. `before(u)` and `after(u)` bracket
  /// each change to a neighbour's adjacency.
  template <class Before, class After>
  void eliminate(Vertex v, Before&& before, After&& after) {
    auto nbrs = std::move(adj_[static_cast<std::size_t>(v)]);
    adj_[static_cast<std::size_t>(v)].clear();
    std::vector<Vertex> merged;
    for (Vertex u : nbrs) {
      before(u);
      auto& list = adj_[static_cast<std::size_t>(u)];
      merged.clear();
      merged.reserve(list.size() + nbrs.size());
      std::set_union(list.begin(), list.end(), nbrs.begin(), nbrs.end(), std::back_inserter(merged));
      std::erase_if(merged, [&](Vertex x) { return x == u || x == v; });
      list.swap(merged);
      after(u);
    }
  }

 private:
  std::vector<std::vector<Vertex>> adj_;
};

WidthCheck run_greedy(const WeightedGraph& g, int cap, TieBreak tie) {
  FillGraph fill(g);
  auto key = [&](Vertex v) {
    return std::pair<int, Vertex>(fill.degree(v), tie == TieBreak::kLowestId ? v : -v);
  };
  std::set<std::pair<int, Vertex>> queue;
  for (Vertex v : g.vertices()) queue.insert(key(v));

  WidthCheck result;
  result.order.sequence.reserve(g.vertex_count());
  int width = 0;
  while (!queue.empty()) {
    const auto [deg, tagged] = *queue.begin();
    queue.erase(queue.begin());
    const Vertex v = tie == TieBreak::kLowestId ? tagged : -tagged;
    width = std::max(width, deg);
    if (width > cap) {
      result.within = false;
      result.width = width;
      result.order = {};
      return result;
    }
    result.order.sequence.push_back(v);
    fill.eliminate(
        v, [&](Vertex u) { queue.erase(key(u)); }, [&](Vertex u) { queue.insert(key(u)); });
  }
  result.within = true;
  result.width = width;
  result.order.width = width;
  return result;
}

}  // namespace

EliminationOrder greedy_degree(const WeightedGraph& g, TieBreak tie) {
  return run_greedy(g, std::numeric_limits<int>::max(), tie).order;
}

WidthCheck greedy_degree_width_max_m(const WeightedGraph& g, int max_width, TieBreak tie) {
  return run_greedy(g, max_width, tie);
}

namespace {

std::vector<int> positions_of(const WeightedGraph& g, const std::vector<Vertex>& sequence) {
  std::vector<int> pos(static_cast<std::size_t>(g.id_bound()), -1);
  if (sequence.size() != g.vertex_count()) {
    throw InconsistencyError("elimination order has " + std::to_string(sequence.size()) +
                             " entries for " + std::to_string(g.vertex_count()) + " vertices");
  }
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Vertex v = sequence[i];
    if (!g.has_vertex(v) || pos[static_cast<std::size_t>(v)] >= 0) {
      throw InconsistencyError("elimination order is not a permutation of the vertex set");
    }
    pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  return pos;
}

}  // namespace

int elimination_width(const WeightedGraph& g, const std::vector<Vertex>& sequence) {
  positions_of(g, sequence);
  FillGraph fill(g);
  int width = 0;
  for (Vertex v : sequence) {
    width = std::max(width, fill.degree(v));
    fill.eliminate(v, [](Vertex) {}, [](Vertex) {});
  }
  return width;
}

int TreeDecomposition::width_of(const std::vector<std::vector<Vertex>>& bags) {
  std::size_t largest = 0;
  for (const auto& b : bags) largest = std::max(largest, b.size());
  return largest == 0 ? 0 : static_cast<int>(largest) - 1;
}

TreeDecomposition decomposition_from_order(const WeightedGraph& g, const EliminationOrder& order) {
  const std::vector<int> pos = positions_of(g, order.sequence);
  FillGraph fill(g);
  TreeDecomposition td;
  td.bags.reserve(order.sequence.size());
  int previous_root = -1;
  for (std::size_t i = 0; i < order.sequence.size(); ++i) {
    const Vertex v = order.sequence[i];
    std::vector<Vertex> bag = fill.neighbors(v);  // all later, since earlier ones are gone
    int parent = -1;
    for (Vertex u : bag) {
      const int p = pos[static_cast<std::size_t>(u)];
      if (parent < 0 || p < parent) parent = p;
    }
    bag.push_back(v);
    std::sort(bag.begin(), bag.end());
    td.bags.push_back(std::move(bag));
    if (parent >= 0) {
      td.tree_edges.emplace_back(static_cast<int>(i), parent);
    } else {
      // Component root; chain components together.
      if (previous_root >= 0) td.tree_edges.emplace_back(previous_root, static_cast<int>(i));
      previous_root = static_cast<int>(i);
    }
    fill.eliminate(v, [](Vertex) {}, [](Vertex) {});
  }
  td.width = TreeDecomposition::width_of(td.bags);
  return td;
}

std::vector<Violation> validate(const WeightedGraph& g, const TreeDecomposition& td) {
  std::vector<Violation> out;
  const std::size_t nodes = td.bags.size();

  // Tree shape.
  bool is_tree = true;
  {
    DisjointSets sets(nodes);
    std::size_t joined = 0;
    for (const auto& [a, b] : td.tree_edges) {
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= nodes || static_cast<std::size_t>(b) >= nodes) {
        out.push_back({ViolationKind::kNotATree, "tree edge references a missing node"});
        is_tree = false;
        continue;
      }
      if (!sets.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b))) {
        out.push_back({ViolationKind::kNotATree,
                       "tree edge " + std::to_string(a) + "-" + std::to_string(b) + " closes a cycle"});
        is_tree = false;
      } else {
        ++joined;
      }
    }
    if (nodes > 0 && joined + 1 != nodes && is_tree) {
      out.push_back({ViolationKind::kNotATree, "decomposition tree is disconnected"});
      is_tree = false;
    }
  }

  const auto n = static_cast<std::size_t>(g.id_bound());
  std::vector<std::vector<int>> occurrences(n);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (Vertex v : td.bags[i]) {
      if (!g.has_vertex(v)) {
        out.push_back({ViolationKind::kForeignVertex,
                       "bag " + std::to_string(i) + " holds non-vertex " + std::to_string(v), v});
        continue;
      }
      occurrences[static_cast<std::size_t>(v)].push_back(static_cast<int>(i));
    }
  }

  for (Vertex v : g.vertices()) {
    if (occurrences[static_cast<std::size_t>(v)].empty()) {
      out.push_back({ViolationKind::kUncoveredVertex, "vertex " + std::to_string(v) + " is in no bag", v});
    }
  }

  auto bag_has = [&](int node, Vertex v) {
    const auto& b = td.bags[static_cast<std::size_t>(node)];
    return std::find(b.begin(), b.end(), v) != b.end();
  };

  for (const Edge& e : g.edges()) {
    const auto& occ = occurrences[static_cast<std::size_t>(e.u)];
    const bool covered = std::any_of(occ.begin(), occ.end(), [&](int i) { return bag_has(i, e.v); });
    if (!covered) {
      out.push_back({ViolationKind::kUncoveredEdge,
                     "edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} is in no bag", e.u,
                     e.v});
    }
  }

  if (is_tree) {
    // In a tree, k nodes induce a connected subtree iff they span k-1 tree edges.
    std::vector<std::size_t> inner(n, 0);
    for (const auto& [a, b] : td.tree_edges) {
      for (Vertex v : td.bags[static_cast<std::size_t>(a)]) {
        if (g.has_vertex(v) && bag_has(b, v)) ++inner[static_cast<std::size_t>(v)];
      }
    }
    for (Vertex v : g.vertices()) {
      const std::size_t k = occurrences[static_cast<std::size_t>(v)].size();
      if (k > 0 && inner[static_cast<std::size_t>(v)] + 1 != k) {
        out.push_back({ViolationKind::kDisconnectedVertex,
                       "bags containing vertex " + std::to_string(v) + " are not connected", v});
      }
    }
  }

  const int actual = TreeDecomposition::width_of(td.bags);
  if (actual != td.width) {
    out.push_back({ViolationKind::kWidthMismatch,
                   "stored width " + std::to_string(td.width) + " but largest bag gives " +
                       std::to_string(actual)});
  }
  return out;
}

void write_td(std::ostream& out, const WeightedGraph& g, const TreeDecomposition& td) {
  out << "s td " << td.bags.size() << " " << td.width + 1 << " " << g.id_bound() << "\n";
  for (std::size_t i = 0; i < td.bags.size(); ++i) {
    out << "b " << i + 1;
    for (Vertex v : td.bags[i]) out << " " << v + 1;
    out << "\n";
  }
  for (const auto& [a, b] : td.tree_edges) out << a + 1 << " " << b + 1 << "\n";
}

TreeDecomposition read_td(std::istream& in) {
  TreeDecomposition td;
  std::string line;
  bool have_header = false;
  std::size_t declared_bags = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string head;
    if (!(ss >> head) || head == "c") continue;
    if (head == "s") {
      std::string kind;
      long bags = 0, bag_size = 0, vertices = 0;
      if (!(ss >> kind >> bags >> bag_size >> vertices) || kind != "td" || bags < 0) {
        throw ParseError(ParseErrorKind::kMalformedHeader, 0, "bad 's td' line");
      }
      declared_bags = static_cast<std::size_t>(bags);
      td.bags.assign(declared_bags, {});
      td.width = static_cast<int>(bag_size) - 1;
      have_header = true;
    } else if (!have_header) {
      throw ParseError(ParseErrorKind::kMalformedHeader, 0, "missing 's td' line");
    } else if (head == "b") {
      long id = 0;
      if (!(ss >> id) || id < 1 || static_cast<std::size_t>(id) > declared_bags) {
        throw ParseError(ParseErrorKind::kSyntax, 0, "bad bag id in '" + line + "'");
      }
      auto& bag = td.bags[static_cast<std::size_t>(id - 1)];
      long v = 0;
      while (ss >> v) bag.push_back(static_cast<Vertex>(v - 1));
      std::sort(bag.begin(), bag.end());
    } else {
      long a = 0, b = 0;
      std::istringstream es(line);
      if (!(es >> a >> b)) throw ParseError(ParseErrorKind::kSyntax, 0, "bad tree edge '" + line + "'");
      td.tree_edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
    }
  }
  if (!have_header) throw ParseError(ParseErrorKind::kMalformedHeader, 0, "missing 's td' line");
  return td;
}

}  // namespace smh
