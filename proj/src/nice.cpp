#include "smh/nice.hpp"

#include <algorithm>

#include "smh/error.hpp"

namespace smh {

const char* to_string(NiceKind kind) {
  switch (kind) {
    case NiceKind::kLeaf: return "leaf";
    case NiceKind::kIntroduceVertex: return "introduce-vertex";
    case NiceKind::kIntroduceEdge: return "introduce-edge";
    case NiceKind::kForget: return "forget";
    case NiceKind::kJoin: return "join";
  }
  return "?";
}

int NiceDecomposition::width() const {
  std::size_t largest = 0;
  for (const auto& n : nodes) largest = std::max(largest, n.bag.size());
  return largest == 0 ? 0 : static_cast<int>(largest) - 1;
}

TreeDecomposition NiceDecomposition::as_tree_decomposition() const {
  TreeDecomposition td;
  td.bags.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    td.bags.push_back(nodes[i].bag);
    for (int c : nodes[i].children) {
      if (c >= 0) td.tree_edges.emplace_back(c, static_cast<int>(i));
    }
  }
  td.width = TreeDecomposition::width_of(td.bags);
  return td;
}

namespace {

class NiceBuilder {
 public:
  explicit NiceBuilder(NiceDecomposition& out) : out_(out) {}

  int leaf(Vertex anchor) {
    NiceNode n;
    n.kind = NiceKind::kLeaf;
    n.bag = {anchor};
    return push(std::move(n));
  }

  int introduce(int child, Vertex v) {
    NiceNode n;
    n.kind = NiceKind::kIntroduceVertex;
    n.vertex = v;
    n.bag = bag(child);
    n.bag.insert(std::upper_bound(n.bag.begin(), n.bag.end(), v), v);
    n.children[0] = child;
    return push(std::move(n));
  }

  int forget(int child, Vertex v) {
    NiceNode n;
    n.kind = NiceKind::kForget;
    n.vertex = v;
    n.bag = bag(child);
    std::erase(n.bag, v);
    n.children[0] = child;
    return push(std::move(n));
  }

  int introduce_edge(int child, const Edge& e) {
    NiceNode n;
    n.kind = NiceKind::kIntroduceEdge;
    n.vertex = e.u;
    n.other = e.v;
    n.weight = e.w;
    n.bag = bag(child);
    n.children[0] = child;
    return push(std::move(n));
  }

  int join(int left, int right) {
    NiceNode n;
    n.kind = NiceKind::kJoin;
    n.bag = bag(left);
    n.children = {left, right};
    return push(std::move(n));
  }

  /// Forgets and introduces vertices one at a time until the bag equals `target`.
  int morph(int node, const std::vector<Vertex>& target) {
    const std::vector<Vertex> current = bag(node);
    std::vector<Vertex> drop, add;
    std::set_difference(current.begin(), current.end(), target.begin(), target.end(), std::back_inserter(drop));
    std::set_difference(target.begin(), target.end(), current.begin(), current.end(), std::back_inserter(add));
    for (Vertex v : drop) node = forget(node, v);
    for (Vertex v : add) node = introduce(node, v);
    return node;
  }

  const std::vector<Vertex>& bag(int node) const { return out_.nodes[static_cast<std::size_t>(node)].bag; }

 private:
  int push(NiceNode n) {
    out_.nodes.push_back(std::move(n));
    return static_cast<int>(out_.nodes.size()) - 1;
  }

  NiceDecomposition& out_;
};

}  // namespace

NiceDecomposition make_nice(const WeightedGraph& g, const TreeDecomposition& td, Vertex anchor) {
  if (!g.has_vertex(anchor)) throw InconsistencyError("anchor is not a graph vertex");
  const std::size_t count = td.bags.size();
  if (count == 0) throw InconsistencyError("empty tree decomposition");

  std::vector<std::vector<int>> adjacent(count);
  for (const auto& [a, b] : td.tree_edges) {
    adjacent[static_cast<std::size_t>(a)].push_back(b);
    adjacent[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& list : adjacent) std::sort(list.begin(), list.end());

  int root = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::binary_search(td.bags[i].begin(), td.bags[i].end(), anchor)) {
      root = static_cast<int>(i);
      break;
    }
  }

  // BFS from the root: parent links and a top-down order.
  std::vector<int> parent(count, -1), order;
  std::vector<char> seen(count, 0);
  order.reserve(count);
  order.push_back(root);
  seen[static_cast<std::size_t>(root)] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int x = order[head];
    for (int y : adjacent[static_cast<std::size_t>(x)]) {
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = 1;
        parent[static_cast<std::size_t>(y)] = x;
        order.push_back(y);
      }
    }
  }
  if (order.size() != count) throw InconsistencyError("tree decomposition is not connected");
  std::vector<int> rank(count);
  for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  // Each edge goes to the highest-ranked (closest to root) bag holding both endpoints.
  std::vector<std::vector<int>> occurrences(static_cast<std::size_t>(g.id_bound()));
  for (std::size_t i = 0; i < count; ++i) {
    for (Vertex v : td.bags[i]) {
      if (g.has_vertex(v)) occurrences[static_cast<std::size_t>(v)].push_back(static_cast<int>(i));
    }
  }
  std::vector<std::vector<Edge>> assigned(count);
  for (const Edge& e : g.edges()) {
    int best = -1;
    for (int i : occurrences[static_cast<std::size_t>(e.u)]) {
      const auto& b = td.bags[static_cast<std::size_t>(i)];
      if (std::binary_search(b.begin(), b.end(), e.v) &&
          (best < 0 || rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(best)])) {
        best = i;
      }
    }
    if (best < 0) throw InconsistencyError("edge not covered by the tree decomposition");
    assigned[static_cast<std::size_t>(best)].push_back(e);
  }

  NiceDecomposition nice;
  nice.anchor = anchor;
  NiceBuilder build(nice);
  std::vector<std::vector<int>> children(count);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int x = order[i];
    children[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])].push_back(x);
  }
  for (auto& list : children) std::sort(list.begin(), list.end());

  std::vector<int> built(count, -1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto x = static_cast<std::size_t>(*it);
    std::vector<Vertex> target = td.bags[x];
    if (!std::binary_search(target.begin(), target.end(), anchor)) {
      target.insert(std::upper_bound(target.begin(), target.end(), anchor), anchor);
    }
    int current = -1;
    if (children[x].empty()) {
      current = build.morph(build.leaf(anchor), target);
    }
    for (int c : children[x]) {
      const int branch = build.morph(built[static_cast<std::size_t>(c)], target);
      current = current < 0 ? branch : build.join(current, branch);
    }
    for (const Edge& e : assigned[x]) current = build.introduce_edge(current, e);
    built[x] = current;
  }
  build.morph(built[static_cast<std::size_t>(root)], {anchor});
  return nice;
}

std::vector<std::string> validate_nice(const WeightedGraph& g, const NiceDecomposition& nice) {
  std::vector<std::string> out;
  if (nice.nodes.empty()) {
    out.emplace_back("no nodes");
    return out;
  }
  const Vertex anchor = nice.anchor;
  auto tag = [](std::size_t i) { return "node " + std::to_string(i) + ": "; };
  std::vector<int> parent_count(nice.nodes.size(), 0);
  std::vector<int> edge_uses(g.edge_count(), 0);

  for (std::size_t i = 0; i < nice.nodes.size(); ++i) {
    const NiceNode& n = nice.nodes[i];
    if (!std::is_sorted(n.bag.begin(), n.bag.end()) ||
        std::adjacent_find(n.bag.begin(), n.bag.end()) != n.bag.end()) {
      out.push_back(tag(i) + "bag not strictly ascending");
    }
    if (!std::binary_search(n.bag.begin(), n.bag.end(), anchor)) out.push_back(tag(i) + "anchor missing");
    for (int c : n.children) {
      if (c < 0) continue;
      if (static_cast<std::size_t>(c) >= i) {
        out.push_back(tag(i) + "child stored after parent");
        continue;
      }
      ++parent_count[static_cast<std::size_t>(c)];
    }
    const auto* child = n.children[0] >= 0 && static_cast<std::size_t>(n.children[0]) < i
                            ? &nice.nodes[static_cast<std::size_t>(n.children[0])].bag
                            : nullptr;
    const bool has_second = n.children[1] >= 0;
    switch (n.kind) {
      case NiceKind::kLeaf:
        if (n.children[0] >= 0 || has_second) out.push_back(tag(i) + "leaf with children");
        if (n.bag != std::vector<Vertex>{anchor}) out.push_back(tag(i) + "leaf bag is not {anchor}");
        break;
      case NiceKind::kIntroduceVertex: {
        if (!child || has_second) {
          out.push_back(tag(i) + "introduce needs exactly one child");
          break;
        }
        auto expected = *child;
        if (std::binary_search(expected.begin(), expected.end(), n.vertex)) {
          out.push_back(tag(i) + "introduced vertex already in child bag");
        }
        expected.insert(std::upper_bound(expected.begin(), expected.end(), n.vertex), n.vertex);
        if (expected != n.bag) out.push_back(tag(i) + "bag is not child bag plus introduced vertex");
        break;
      }
      case NiceKind::kForget: {
        if (!child || has_second) {
          out.push_back(tag(i) + "forget needs exactly one child");
          break;
        }
        if (n.vertex == anchor) out.push_back(tag(i) + "anchor forgotten");
        auto expected = *child;
        if (std::erase(expected, n.vertex) != 1) out.push_back(tag(i) + "forgotten vertex not in child bag");
        if (expected != n.bag) out.push_back(tag(i) + "bag is not child bag minus forgotten vertex");
        break;
      }
      case NiceKind::kIntroduceEdge: {
        if (!child || has_second) {
          out.push_back(tag(i) + "introduce-edge needs exactly one child");
          break;
        }
        if (*child != n.bag) out.push_back(tag(i) + "introduce-edge changes the bag");
        if (!std::binary_search(n.bag.begin(), n.bag.end(), n.vertex) ||
            !std::binary_search(n.bag.begin(), n.bag.end(), n.other)) {
          out.push_back(tag(i) + "edge endpoints not in bag");
        }
        const std::int32_t e = g.edge_index(n.vertex, n.other);
        if (e < 0) {
          out.push_back(tag(i) + "introduced edge is not a graph edge");
        } else {
          ++edge_uses[static_cast<std::size_t>(e)];
          if (g.edges()[static_cast<std::size_t>(e)].w != n.weight) out.push_back(tag(i) + "edge weight mismatch");
        }
        break;
      }
      case NiceKind::kJoin: {
        if (!child || !has_second || static_cast<std::size_t>(n.children[1]) >= i) {
          out.push_back(tag(i) + "join needs two children");
          break;
        }
        if (*child != n.bag || nice.nodes[static_cast<std::size_t>(n.children[1])].bag != n.bag) {
          out.push_back(tag(i) + "join children bags differ from parent bag");
        }
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < nice.nodes.size(); ++i) {
    if (parent_count[i] != 1) out.push_back(tag(i) + "has " + std::to_string(parent_count[i]) + " parents");
  }
  if (parent_count.back() != 0) out.emplace_back("root has a parent");
  if (nice.nodes.back().bag != std::vector<Vertex>{anchor}) out.emplace_back("root bag is not {anchor}");
  for (std::size_t e = 0; e < edge_uses.size(); ++e) {
    if (edge_uses[e] != 1) {
      const Edge& edge = g.edges()[e];
      out.push_back("edge {" + std::to_string(edge.u) + "," + std::to_string(edge.v) + "} introduced " +
                    std::to_string(edge_uses[e]) + " times");
    }
  }
  for (const Violation& v : validate(g, nice.as_tree_decomposition())) out.push_back(v.message);
  return out;
}

}  // namespace smh
